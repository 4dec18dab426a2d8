"""Rule-transcription conformance: one test per machine rule.

Each case instantiates a rule's left-hand side with inert placeholders and
states the right-hand side (or value status) independently, in concrete
syntax, transcribed from the rule displays.  The machine must take exactly
that rule, produce an alpha-equal result, and carry the stated stability
flag.
"""

import pytest

from ccl.opsem import RULES, StepsTo, Value, is_val, rule_fires, step
from ccl.parser import parse, pretty
from ccl.syntax import alpha_eq

VAL = "VAL"


class T:
    def __init__(self, rule, src, expect, stable):
        self.rule = rule
        self.src = src
        self.expect = expect
        self.stable = stable

    def __repr__(self):
        return self.rule


# --- the composite right-hand sides, assembled from the rule displays -------


def _ghcom_split_rhs():
    inner = "ghcom bool 0 ~> q true [z=0 w. true]"

    def t(e, ebar):
        return (
            f"hcom bool 0 ~> z1 true [y={e} q. false] [y={ebar} q. {inner}]"
            f" [z=0 w. true]"
        )

    return (
        f"hcom bool 0 ~> r true [x=0 z1. {t(0, 1)}] [x=1 z1. {t(1, 0)}]"
        f" [x=y q. false] [z=0 w. true]"
    )


def _coe_v_diag_rhs():
    vty = "V x bool nat zero"

    def o_eps(eps, tgt):
        return f"Vproj {tgt} (coe (x. {vty}) {eps} ~> {tgt} true) (fst zero)"

    def p(tgt):
        return (
            f"com (x. nat) y ~> {tgt} (Vproj y true (fst zero))"
            f" [y=0 w. {o_eps(0, 'w')}] [y=1 w. {o_eps(1, 'w')}]"
        )

    def p0_at(eps):
        return (
            f"com (x. nat) {eps} ~> 0 (Vproj {eps} true (fst zero))"
            f" [{eps}=0 w. {o_eps(0, 'w')}] [{eps}=1 w. {o_eps(1, 'w')}]"
        )

    def q(eps, arg):
        back = f"coe (y. bool) {eps} ~> y ({arg})"
        return (
            f"pair ({back}) (dlam z. com (y. nat) {eps} ~> y ({p0_at(eps)})"
            f" [z=0 y. app (fst zero) ({back})] [z=1 y. {p(0)}])"
        )

    big_r = (
        f"dapp (app (app (snd (app (snd zero) ({p(0)}))) ({q(0, 'true')}))"
        f" ({q(1, f'coe (x. {vty}) 1 ~> 0 true')})) y"
    )
    return (
        f"Vin z2 (fst ({big_r})) (hcom nat 1 ~> 0 ({p('z2')})"
        f" [y=0 u. {o_eps(0, 'z2')}] [y=1 u. {o_eps(1, 'z2')}]"
        f" [y=z2 u. Vproj z2 true (fst zero)]"
        f" [z2=0 z. dapp (snd ({big_r})) z])"
    )


def _hcom_fcom_rhs():
    def p0(tgt):
        return (
            f"hcom nat y ~> y2 (coe (zz. nat) 1 ~> {tgt} true)"
            f" [w=1 q. coe (zz. nat) 1 ~> {tgt} false]"
        )

    def f_at(c, tgt):
        return (
            f"hcom bool 1 ~> {tgt} (cap 0 ~> 1 ({c}) [x=0 zz. nat])"
            f" [x=0 z'. coe (zz. nat) z' ~> 0 (coe (zz. nat) 1 ~> z' ({c}))]"
        )

    big_o = f"hcom bool y ~> y2 ({f_at('true', 0)}) [w=1 q. {f_at('false', 0)}]"
    q = (
        f"hcom bool 0 ~> 1 ({big_o})"
        f" [w=1 z. {f_at('false', 'z')}]"
        f" [x=0 z. coe (zz. nat) z ~> 0 ({p0('z')})]"
        f" [y=y2 z. {f_at('true', 'z')}]"
    )
    return f"box 0 ~> 1 ({q}) [x=0 {p0(1)}]"


def _coe_fcom_rhs():
    def n0(ztgt, xtgt):
        return f"coe (zz. nat) 1 ~> {ztgt} (coe (x. nat) y2 ~> {xtgt} true)"

    def big_o(tgt):
        return (
            f"hcom bool 1 ~> {tgt} (cap 0 ~> 1 true [w=y zz. nat])"
            f" [w=y z. coe (zz. nat) z ~> 0 ({n0('z', 'y2')})]"
        )

    p = (
        f"gcom (x. bool) y2 ~> y3 ({big_o(0)})"
        f" [w=y x. {n0(0, 'x')}] [0=1 x. coe (x. bool) y2 ~> x true]"
    )

    def q0(tgt):
        return (
            f"gcom (zz. nat) 0 ~> {tgt} ({p})"
            f" [w=y z. {n0('z', 'y3')}] [y2=y3 z. {n0('z', 'y3')}]"
        )

    inner = (
        f"hcom bool 0 ~> 1 ({p})"
        f" [w=y z. coe (zz. nat) z ~> 0 ({q0('z')})]"
        f" [y2=y3 z. {big_o('z')}]"
    )
    return f"box 0 ~> 1 ({inner}) [w=y {q0(1)}]"


CASES = [
    # -- canonical type formers ------------------------------------------------
    T("types/pi-val", "pi (a : bool) nat", VAL, True),
    T("types/sg-val", "sg (a : bool) nat", VAL, True),
    T("types/path-val", "path (x. bool) true false", VAL, True),
    T("types/eq-val", "eq bool true false", VAL, True),
    T("types/void-val", "void", VAL, True),
    T("types/nat-val", "nat", VAL, True),
    T("types/bool-val", "bool", VAL, True),
    T("types/wbool-val", "wbool", VAL, True),
    T("types/circle-val", "S1", VAL, True),
    T("types/upre-val", "U pre 2", VAL, True),
    T("types/ukan-val", "U kan 3", VAL, True),
    T("types/v-val", "V x bool nat zero", VAL, False),
    T("types/v-zero", "V 0 bool nat zero", "bool", True),
    T("types/v-one", "V 1 bool nat zero", "nat", True),
    # -- Kan operations -----------------------------------------------------
    T("kan/hcom-cong",
      "hcom (V 0 bool nat zero) 0 ~> 1 true [x=0 y. true]",
      "hcom bool 0 ~> 1 true [x=0 y. true]", True),
    T("kan/coe-cong",
      "coe (x. V 0 bool nat zero) 0 ~> 1 true",
      "coe (x. bool) 0 ~> 1 true", True),
    T("kan/com-unfold",
      "com (y. bool) 0 ~> z true [x=0 w. false]",
      "hcom bool 0 ~> z (coe (y. bool) 0 ~> z true)"
      " [x=0 w. coe (y. bool) w ~> z false]", True),
    T("kan/fcom-cap", "fcom z ~> z true [x=0 y. false]", "true", True),
    T("kan/fcom-tube",
      "fcom 0 ~> 1 true [x=y y1. false] [z=z w. loop w]", "loop 1", False),
    T("kan/fcom-val", "fcom 0 ~> 1 true [x=0 y. true]", VAL, False),
    T("kan/ghcom-empty", "ghcom bool 0 ~> 1 true", "true", True),
    T("kan/ghcom-split",
      "ghcom bool 0 ~> r true [x=y q. false] [z=0 w. true]",
      _ghcom_split_rhs(), True),
    T("kan/gcom-unfold",
      "gcom (y. bool) 0 ~> z true [x=0 w. false]",
      "ghcom bool 0 ~> z (coe (y. bool) 0 ~> z true)"
      " [x=0 w. coe (y. bool) w ~> z false]", True),
    # -- dependent function types ---------------------------------------------
    T("fun/app-cong",
      "app (fst (pair (lam a. a) zero)) true", "app (lam a. a) true", True),
    T("fun/beta", "app (lam a. suc a) zero", "suc zero", True),
    T("fun/lam-val", "lam a. zero", VAL, True),
    T("fun/hcom",
      "hcom (pi (a : bool) nat) 0 ~> 1 zero [x=0 y. suc zero]",
      "lam a. hcom nat 0 ~> 1 (app zero a) [x=0 y. app (suc zero) a]", True),
    T("fun/coe",
      "coe (x. pi (a : bool) (eq nat a a)) 0 ~> 1 zero",
      "lam a. coe (x. eq nat (coe (x. bool) 1 ~> x a) (coe (x. bool) 1 ~> x a))"
      " 0 ~> 1 (app zero (coe (x. bool) 1 ~> 0 a))", True),
    # -- dependent pair types ----------------------------------------------------
    T("pair/fst-cong",
      "fst (snd (pair zero (pair true false)))", "fst (pair true false)", True),
    T("pair/snd-cong",
      "snd (snd (pair zero (pair true false)))", "snd (pair true false)", True),
    T("pair/pair-val", "pair zero true", VAL, True),
    T("pair/fst-beta", "fst (pair zero true)", "zero", True),
    T("pair/snd-beta", "snd (pair zero true)", "true", True),
    T("pair/hcom",
      "hcom (sg (a : bool) (eq nat a a)) 0 ~> 1 (pair true zero)"
      " [x=0 y. pair false zero]",
      "pair (hcom bool 0 ~> 1 (fst (pair true zero)) [x=0 y. fst (pair false zero)])"
      " (com (z. eq nat"
      " (hcom bool 0 ~> z (fst (pair true zero)) [x=0 y. fst (pair false zero)])"
      " (hcom bool 0 ~> z (fst (pair true zero)) [x=0 y. fst (pair false zero)]))"
      " 0 ~> 1 (snd (pair true zero)) [x=0 y. snd (pair false zero)])", True),
    T("pair/coe",
      "coe (x. sg (a : bool) (eq nat a a)) 0 ~> 1 (pair true zero)",
      "pair (coe (x. bool) 0 ~> 1 (fst (pair true zero)))"
      " (coe (x. eq nat (coe (x. bool) 0 ~> x (fst (pair true zero)))"
      " (coe (x. bool) 0 ~> x (fst (pair true zero))))"
      " 0 ~> 1 (snd (pair true zero)))", True),
    # -- path types -----------------------------------------------------------
    T("path/dapp-cong",
      "dapp (fst (pair (dlam x. base) zero)) 1", "dapp (dlam x. base) 1", True),
    T("path/beta", "dapp (dlam x. loop x) y", "loop y", True),
    T("path/dlam-val", "dlam x. base", VAL, True),
    T("path/hcom",
      "hcom (path (x. S1) base (loop w)) 0 ~> 1 zero [w=0 y. true]",
      "dlam x. hcom S1 0 ~> 1 (dapp zero x) [x=0 u. base] [x=1 u. loop w]"
      " [w=0 y. dapp true x]", True),
    T("path/coe",
      "coe (y. path (x. S1) (loop y) base) 0 ~> 1 zero",
      "dlam x. com (y. S1) 0 ~> 1 (dapp zero x) [x=0 y. loop y] [x=1 y. base]",
      True),
    # -- equality pretypes ---------------------------------------------------
    T("eq/star-val", "*", VAL, True),
    T("eq/hcom", "hcom (eq bool true false) 0 ~> 1 zero [x=0 y. true]", "*", True),
    # -- natural numbers -------------------------------------------------------
    T("nat/zero-val", "zero", VAL, True),
    T("nat/suc-val", "suc (app zero true)", VAL, True),
    T("nat/natrec-cong",
      "natrec (fst (pair zero true)) false (n a. true)",
      "natrec zero false (n a. true)", True),
    T("nat/natrec-zero", "natrec zero false (n a. true)", "false", True),
    T("nat/natrec-suc",
      "natrec (suc zero) false (n a. pair n a)",
      "pair zero (natrec zero false (n a. pair n a))", True),
    T("nat/hcom", "hcom nat 0 ~> 1 zero [x=0 y. suc zero]", "zero", True),
    T("nat/coe", "coe (x. nat) 0 ~> y zero", "zero", True),
    # -- booleans -----------------------------------------------------------
    T("bool/true-val", "true", VAL, True),
    T("bool/false-val", "false", VAL, True),
    T("bool/if-cong",
      "if (b. bool) (fst (pair true zero)) false true",
      "if (b. bool) true false true", True),
    T("bool/if-true", "if (b. nat) true zero (suc zero)", "zero", True),
    T("bool/if-false", "if (b. nat) false zero (suc zero)", "suc zero", True),
    T("bool/hcom", "hcom bool 0 ~> 1 true [x=0 y. false]", "true", True),
    T("bool/coe", "coe (x. bool) y ~> 0 false", "false", True),
    # -- weak booleans ----------------------------------------------------------
    T("wbool/hcom",
      "hcom wbool 0 ~> 1 true [x=0 y. false]",
      "fcom 0 ~> 1 true [x=0 y. false]", True),
    T("wbool/if-fcom",
      "if (b. eq wbool b b) (fcom 0 ~> 1 true [x=0 y. false]) zero (suc zero)",
      "com (z. eq wbool (fcom 0 ~> z true [x=0 y. false])"
      " (fcom 0 ~> z true [x=0 y. false]))"
      " 0 ~> 1 (if (b. eq wbool b b) true zero (suc zero))"
      " [x=0 y. if (b. eq wbool b b) false zero (suc zero)]", False),
    T("wbool/coe", "coe (x. wbool) 0 ~> y true", "true", True),
    # -- circle ------------------------------------------------------------------
    T("circle/hcom",
      "hcom S1 0 ~> 1 base [x=0 y. base]", "fcom 0 ~> 1 base [x=0 y. base]", True),
    T("circle/loop-eps", "loop 0", "base", True),
    T("circle/base-val", "base", VAL, True),
    T("circle/loop-val", "loop x", VAL, False),
    T("circle/elim-cong",
      "S1elim (c. S1) (fst (pair base zero)) base (x. loop x)",
      "S1elim (c. S1) base base (x. loop x)", True),
    T("circle/elim-base", "S1elim (c. S1) base (loop w) (x. base)", "loop w", True),
    T("circle/elim-loop", "S1elim (c. S1) (loop w) base (x. loop x)", "loop w", False),
    T("circle/elim-fcom",
      "S1elim (c. eq S1 c c) (fcom 0 ~> 1 base [x=0 y. base]) zero (q. true)",
      "com (z. eq S1 (fcom 0 ~> z base [x=0 y. base])"
      " (fcom 0 ~> z base [x=0 y. base]))"
      " 0 ~> 1 (S1elim (c. eq S1 c c) base zero (q. true))"
      " [x=0 y. S1elim (c. eq S1 c c) base zero (q. true)]", False),
    T("circle/coe", "coe (x. S1) 1 ~> y base", "base", True),
    # -- univalence -----------------------------------------------------------
    T("ua/vin-val", "Vin x true false", VAL, False),
    T("ua/vin-zero", "Vin 0 true false", "true", True),
    T("ua/vin-one", "Vin 1 true false", "false", True),
    T("ua/vproj-zero", "Vproj 0 true (lam a. a)", "app (lam a. a) true", True),
    T("ua/vproj-one", "Vproj 1 true zero", "true", True),
    T("ua/vproj-cong",
      "Vproj x (fst (pair (Vin x true false) zero)) (lam a. a)",
      "Vproj x (Vin x true false) (lam a. a)", False),
    T("ua/vproj-vin", "Vproj x (Vin x true false) (lam a. a)", "false", False),
    T("ua/hcom",
      "hcom (V x bool nat zero) 0 ~> 1 true [x=0 y. false]",
      "Vin x (hcom bool 0 ~> 1 true [x=0 y. false])"
      " (hcom nat 0 ~> 1 (Vproj x true (fst zero))"
      " [x=0 q. Vproj x false (fst zero)]"
      " [x=0 w. app (fst zero) (hcom bool 0 ~> w true [x=0 y. false])]"
      " [x=1 w. hcom nat 0 ~> w true [x=0 y. false]])", False),
    T("ua/coe-zero",
      "coe (x. V x bool nat (pair zero (loop x))) 0 ~> y true",
      "Vin y true (coe (x. nat) 0 ~> y (app (fst (pair zero (loop 0))) true))",
      True),
    T("ua/coe-one",
      "coe (x. V x bool nat (pair zero (loop x))) 1 ~> y false",
      "Vin y (fst (fst (app (snd (pair zero (loop y)))"
      " (coe (x. nat) 1 ~> y false))))"
      " (hcom nat 1 ~> 0 (coe (x. nat) 1 ~> y false)"
      " [y=0 q. dapp (snd (fst (app (snd (pair zero (loop y)))"
      " (coe (x. nat) 1 ~> y false)))) q]"
      " [y=1 q2. coe (x. nat) 1 ~> y false])", True),
    T("ua/coe-diag",
      "coe (x. V x bool nat zero) y ~> z2 true", _coe_v_diag_rhs(), False),
    T("ua/coe-other",
      "coe (y. V x bool nat (pair zero (loop y))) 0 ~> 1 true",
      "Vin x (coe (y. bool) 0 ~> 1 true)"
      " (com (y. nat) 0 ~> 1 (Vproj x true (fst (pair zero (loop 0))))"
      " [x=0 y. app (fst (pair zero (loop y))) (coe (y. bool) 0 ~> y true)]"
      " [x=1 y. coe (y. nat) 0 ~> y true])", False),
    # -- universes ---------------------------------------------------------------
    T("univ/hcom-kan",
      "hcom (U kan 2) 0 ~> 1 bool [x=0 y. nat]",
      "fcom 0 ~> 1 bool [x=0 y. nat]", True),
    T("univ/coe", "coe (x. U pre 1) 0 ~> y bool", "bool", True),
    T("univ/box-cap", "box z ~> z true [0=1 false]", "true", True),
    T("univ/box-tube", "box 0 ~> 1 true [x=x false] [0=0 zero]", "false", False),
    T("univ/box-val", "box 0 ~> 1 true [x=0 false]", VAL, False),
    T("univ/cap-cap", "cap y ~> y true [x=0 z. bool]", "true", True),
    T("univ/cap-tube",
      "cap 0 ~> 1 true [x=x z. eq bool false (loop z)]",
      "coe (z. eq bool false (loop z)) 1 ~> 0 true", False),
    T("univ/cap-cong",
      "cap 0 ~> 1 (fst (pair true zero)) [x=0 z. bool]",
      "cap 0 ~> 1 true [x=0 z. bool]", False),
    T("univ/cap-box",
      "cap 0 ~> 1 (box 0 ~> 1 true [x=0 false]) [x=0 z. bool]", "true", False),
    T("univ/hcom-fcom",
      "hcom (fcom 0 ~> 1 bool [x=0 zz. nat]) y ~> y2 true [w=1 q. false]",
      _hcom_fcom_rhs(), False),
    T("univ/coe-fcom",
      "coe (x. fcom 0 ~> 1 bool [w=y zz. nat]) y2 ~> y3 true",
      _coe_fcom_rhs(), False),
]


@pytest.mark.parametrize("case", CASES, ids=[c.rule for c in CASES])
def test_rule_transcription(case):
    term = parse(case.src)
    fires = rule_fires(term)
    assert len(fires) == 1, f"expected exactly one rule, got {fires}"
    assert fires[0].rule == case.rule
    if case.expect == VAL:
        v = is_val(term)
        assert isinstance(v, Value)
        assert v.stable == case.stable
        assert v.rule == case.rule
    else:
        out = step(term)
        assert isinstance(out, StepsTo), f"did not step: {out}"
        assert out.rule == case.rule
        expected = parse(case.expect)
        assert alpha_eq(out.term, expected), (
            f"\n got: {pretty(out.term)}\nwant: {pretty(expected)}"
        )
        assert out.stable == case.stable


def test_every_rule_is_covered():
    covered = {c.rule for c in CASES}
    assert covered == set(RULES), (
        f"missing: {sorted(set(RULES) - covered)}; "
        f"unknown: {sorted(covered - set(RULES))}"
    )


def test_case_stability_flags_match_catalog():
    # A congruence case may demote stability, never promote it.
    for c in CASES:
        assert c.stable <= RULES[c.rule]["stable"], c.rule
