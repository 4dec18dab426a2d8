"""Derivation checking: restriction normalization, soundness, mutation."""

import json
import random

import pytest

from ccl.cube import DIM0, DIM1, DimConst, DimName, DimSubst, Equation
from ccl import syntax as S
from ccl.checker import (
    KAN,
    PRE,
    Derivation,
    EqTm,
    EqType,
    InstantiationError,
    Judgment,
    Plain,
    RULES,
    Vacuous,
    WfShape,
    check_derivation,
    derivation_from_json,
    derivation_to_json,
    expand_restriction,
    instantiate_rule,
    judgment_matches,
    rule_catalog,
)
from ccl.derivations import build_all
from ccl.gen import GenConfig, TermGen
from ccl.parser import parse
from ccl.syntax import SIG, _FIELDS, alpha_eq, fv

X, Y = DimName("x"), DimName("y")


def J(form, psi=(), hyps=(), xi=()):
    return Judgment(frozenset(psi), tuple(xi), tuple(hyps), form)


# ---------------------------------------------------------------------------
# Restriction normalization


def test_expand_empty_restriction():
    j = J(EqTm(S.TRUE, S.TRUE, S.BOOL))
    out = expand_restriction(j)
    assert isinstance(out, Plain) and out.judgments == (j,)


def test_expand_drops_reflexive_endpoint():
    j = J(EqTm(S.TRUE, S.TRUE, S.BOOL), xi=(Equation(DIM1, DIM1),))
    out = expand_restriction(j)
    assert isinstance(out, Plain) and out.judgments[0].xi == ()


def test_expand_clash_is_vacuous():
    j = J(EqTm(S.TRUE, S.FALSE, S.BOOL), xi=(Equation(DIM0, DIM1),))
    assert isinstance(expand_restriction(j), Vacuous)


def test_expand_substitutes_names():
    j = J(
        EqTm(S.Loop(X), S.Base(), S.CIRCLE),
        psi=("x",),
        xi=(Equation(X, DIM0),),
    )
    out = expand_restriction(j)
    (res,) = out.judgments
    assert res.psi == frozenset()
    assert res.form == EqTm(S.Loop(DIM0), S.Base(), S.CIRCLE)


def test_expand_iterates_into_vacuous():
    # x=0 then x=1 clash after substitution
    j = J(
        EqTm(S.TRUE, S.TRUE, S.BOOL),
        psi=("x",),
        xi=(Equation(X, DIM0), Equation(X, DIM1)),
    )
    assert isinstance(expand_restriction(j), Vacuous)


def test_expand_name_to_name():
    j = J(
        EqTm(S.Loop(X), S.Loop(Y), S.CIRCLE),
        psi=("x", "y"),
        xi=(Equation(X, Y),),
    )
    (res,) = expand_restriction(j).judgments
    assert res.form == EqTm(S.Loop(Y), S.Loop(Y), S.CIRCLE)
    assert res.psi == {"y"}


def _random_restricted_judgment(rng, tg):
    terms = [next(tg.terms(1)) for _ in range(3)]
    psi = set(tg.psi)
    for t in terms:
        psi |= S.fd(t)
    dims = [DIM0, DIM1] + [DimName(x) for x in sorted(psi)]
    xi = tuple(
        Equation(rng.choice(dims), rng.choice(dims))
        for _ in range(rng.randrange(4))
    )
    return J(EqTm(*terms), psi=psi, xi=xi)


def _canon_dims(j: Judgment) -> Judgment:
    """Rename the dimension context in order of first occurrence.

    The context names of a judgment are binding positions, so the two
    expansion orders may keep different representatives; canonicalizing
    makes renamings comparable.
    """
    from ccl.syntax import term_to_json

    order = []

    def walk(obj):
        if isinstance(obj, dict):
            if set(obj) == {"name"}:
                if obj["name"] not in order:
                    order.append(obj["name"])
            else:
                for v in obj.values():
                    walk(v)
        elif isinstance(obj, (list, tuple)):
            for v in obj:
                walk(v)

    for part in (j.form.lhs, j.form.rhs, j.form.ty):
        walk(term_to_json(part))
    for x in sorted(j.psi):
        if x not in order:
            order.append(x)
    sub = DimSubst(j.psi, frozenset(f"#d{i}" for i in range(len(order))),
                   {x: DimName(f"#d{order.index(x)}") for x in j.psi})
    from ccl.checker import judgment_apply

    return judgment_apply(j, sub)


def test_expansion_order_is_confluent():
    rng = random.Random(11)
    tg = TermGen(GenConfig(seed=11, max_depth=2))
    for _ in range(300):
        j = _random_restricted_judgment(rng, tg)
        l2r = expand_restriction(j, right_to_left=False)
        r2l = expand_restriction(j, right_to_left=True)
        if isinstance(l2r, Vacuous) or isinstance(r2l, Vacuous):
            assert type(l2r) is type(r2l), j
        else:
            a = _canon_dims(l2r.judgments[0])
            b = _canon_dims(r2l.judgments[0])
            assert a.psi == b.psi
            assert alpha_eq(a.form.lhs, b.form.lhs)
            assert alpha_eq(a.form.rhs, b.form.rhs)
            assert alpha_eq(a.form.ty, b.form.ty)


# ---------------------------------------------------------------------------
# The rule catalog


def test_catalog_is_complete():
    catalog = rule_catalog()
    assert len(catalog) == 109
    ids = [rid for rid, _ in catalog]
    assert "bool/form-kan" in ids
    assert "kan/hcom" in ids
    assert "univ/cumulativity" in ids
    assert "restrict/eps-neq" in ids
    for rid, schema in catalog:
        assert schema.desc
        assert isinstance(schema.metavars, dict)


def test_spec_catalog_examples():
    inst = instantiate_rule("bool/form-kan", {})
    assert inst.premises == []
    assert inst.conclusion.form == EqType(KAN, S.BOOL, S.BOOL)

    eqs = (Equation(X, X), Equation(X, DIM0))
    got = instantiate_rule(
        "kan/hcom",
        {"A": S.BOOL, "A'": S.BOOL, "r": DIM0, "r'": DIM1, "M": S.TRUE,
         "M'": S.TRUE, "y": "y", "eqs": eqs, "N": (S.TRUE, S.TRUE),
         "N'": (S.TRUE, S.TRUE)},
    )
    # wfshape + type + cap + 4 adjacency + 2 cap-tube premises
    assert len(got.premises) == 3 + 4 + 2
    assert isinstance(got.premises[0].form, WfShape)

    lvl = instantiate_rule(
        "univ/cumulativity",
        {"kappa": KAN, "i": 1, "j": 0, "A": S.BOOL, "A'": S.BOOL},
    )
    assert any(sc.check() for sc in lvl.side_conditions)  # 1 <= 0 fails


def test_instantiate_missing_metavariable():
    with pytest.raises(InstantiationError):
        instantiate_rule("fun/intro", {"a": "a", "A": S.BOOL})


def test_instantiate_wrong_sort():
    with pytest.raises(InstantiationError):
        instantiate_rule(
            "struct/type-sym", {"kappa": "kan", "A": S.BOOL, "A'": DIM0}
        )


def test_instantiate_unknown_rule():
    with pytest.raises(InstantiationError):
        instantiate_rule("no/such-rule", {})


# ---------------------------------------------------------------------------
# Soundness of instantiation: assumed-leaf trees always check


def _random_inst(rid: str, rng: random.Random, tg: TermGen) -> dict:
    """A well-sorted random instantiation for each schema."""
    t = lambda: tg.term(2)
    d = tg.dim
    name = lambda: rng.choice(["x", "y", "w"])
    var = lambda: rng.choice(["a", "b", "c"])
    kappa = lambda: rng.choice([PRE, KAN])
    eps = lambda: rng.choice([DIM0, DIM1])

    def eqs(n=None):
        n = rng.randrange(1, 3) if n is None else n
        return tuple(Equation(d(), d()) for _ in range(n))

    def judgment():
        a, b, c = t(), t(), t()
        psi = S.fd(a) | S.fd(b) | S.fd(c) | {"x", "y"} | set(tg.psi)
        return J(EqTm(a, b, c), psi=psi)

    base = {
        "A": t, "A'": t, "A''": t, "B": t, "B'": t, "C": t, "E": t, "E'": t,
        "F": t, "F'": t, "M": t, "M'": t, "M''": t, "N": t, "N'": t,
        "P": t, "P'": t, "P0": t, "P0'": t, "P1": t, "P1'": t, "T": t,
        "T'": t, "Z": t, "Z'": t, "St": t, "St'": t, "L": t, "L'": t,
        "r": d, "r'": d, "eps": eps, "x": name, "y": name, "a": var,
        "b": var, "c": var, "n": var, "kappa": kappa, "J": judgment,
        "i": lambda: rng.randrange(3), "j": lambda: rng.randrange(3),
        "k": lambda: 0,
    }
    inst = {
        key: base[key]() for key in RULES[rid].metavars if key in base
    }

    # structure-dependent metavariables and constraints
    if "eqs" in RULES[rid].metavars:
        n = rng.randrange(1, 3)
        inst["eqs"] = eqs(n)
        for key in ("N", "N'", "B", "B'"):
            if key in RULES[rid].metavars:
                inst[key] = tuple(t() for _ in range(n))
        if "i" in RULES[rid].metavars:
            inst["i"] = rng.randrange(n)
        if "j" in RULES[rid].metavars:
            inst["j"] = rng.randrange(n)
    if rid == "struct/hypothesis":
        inst["gamma"] = (("a", S.BOOL), ("b", S.NAT))
        inst["k"] = rng.randrange(2)
    if rid in ("nat/elim", "nat/beta-suc", "nat/beta-zero"):
        inst["n"], inst["a"] = "n", "acc"
    if rid == "struct/weakening":
        inst["a"] = "w9"
        inst["k"] = 0
    if rid == "struct/dsubst":
        j = inst["J"]
        targets = frozenset({"u", "v"})
        inst["sub"] = DimSubst(
            j.psi, targets,
            {x: rng.choice([DIM0, DIM1, DimName("u"), DimName("v")]) for x in j.psi},
        )
    if rid == "restrict/empty":
        inst["J"] = inst["J"].with_xi(())
    if rid == "restrict/subst":
        inst["x"] = "x"
        inst["r"] = rng.choice([DIM0, DIM1, DimName("y")])
    if rid in ("kan/shape-refl",):
        r0 = d()
        inst["eqs"] = (Equation(r0, r0),) + eqs(1)
        inst["i"] = 0
    if rid == "kan/shape-opposed":
        shared = d()
        inst["eqs"] = (Equation(shared, DIM0), Equation(shared, DIM1))
        inst["i"], inst["j"] = 0, 1
    if rid in ("kan/hcom-tube", "kan/com-tube", "univ/box-tube", "univ/cap-tube"):
        r0 = d()
        rest = inst["eqs"][1:]
        inst["eqs"] = (Equation(r0, r0),) + rest
        inst["i"] = 0
        if rid in ("univ/box-tube", "univ/cap-tube") and "j" in RULES[rid].metavars:
            inst["j"] = rng.randrange(3)
    if rid == "univ/cumulativity":
        inst["i"] = rng.randrange(2)
        inst["j"] = inst["i"] + rng.randrange(2)
    if rid in ("univ/in-pre", "univ/kan-in-kan"):
        inst["i"] = rng.randrange(2)
        inst["j"] = inst["i"] + 1 + rng.randrange(2)
    if rid == "comp/term":
        reduct = t()
        inst["M"] = S.Fst(S.Pair(reduct, t()))
        inst["M'"] = reduct
    if rid == "comp/type":
        reduct = t()
        inst["A"] = S.V(DIM0, reduct, t(), t())
        inst["A'"] = reduct
    if rid in ("univ/box", "univ/cap", "univ/cap-box", "univ/box-cap",
               "univ/box-tube", "univ/cap-tube", "univ/box-cap-eq", "univ/cap-eq"):
        # universe levels are plain "j" here, distinct from tube indices
        if "j" in RULES[rid].metavars and RULES[rid].metavars["j"] == "level":
            inst["j"] = rng.randrange(3)
    return inst


def _assumed_tree(rid: str, inst: dict) -> Derivation:
    instance = instantiate_rule(rid, inst)
    leaves = tuple(
        Derivation("assume", prem, {}, ()) for prem in instance.premises
    )
    return Derivation(rid, instance.conclusion, inst, leaves)


NON_RANDOM = set()


@pytest.mark.parametrize("rid", sorted(RULES))
def test_instantiation_soundness(rid):
    rng = random.Random(hash(rid) & 0xFFFF)
    tg = TermGen(GenConfig(seed=hash(rid) & 0xFF, max_depth=2))
    for trial in range(5):
        inst = _random_inst(rid, rng, tg)
        tree = _assumed_tree(rid, inst)
        report = check_derivation(tree, assume_leaves=True)
        assert report.ok, f"{rid} trial {trial}: {report.reason}"


def test_assumed_leaves_rejected_by_default():
    tree = _assumed_tree("bool/intro-true", {})
    assert check_derivation(tree).ok  # no premises, no leaves involved
    layered = Derivation(
        "struct/term-sym",
        J(EqTm(S.TRUE, S.TRUE, S.BOOL)),
        {"M": S.TRUE, "M'": S.TRUE, "A": S.BOOL},
        (Derivation("assume", J(EqTm(S.TRUE, S.TRUE, S.BOOL)), {}, ()),),
    )
    assert not check_derivation(layered).ok
    assert check_derivation(layered, assume_leaves=True).ok


# ---------------------------------------------------------------------------
# The derivation corpus


def test_corpus_all_accepted():
    corpus = build_all()
    assert len(corpus) >= 20
    for name, d in sorted(corpus.items()):
        report = check_derivation(d)
        assert report.ok, f"{name}: {report.path} {report.reason}"


def test_corpus_spans_rule_families():
    used = set()

    def rules_of(d):
        used.add(d.rule)
        for c in d.children:
            rules_of(c)

    for d in build_all().values():
        rules_of(d)
    families = {rid.split("/")[0] for rid in used}
    assert {"struct", "restrict", "comp", "kan", "fun", "pair", "path", "eq",
            "void", "nat", "bool", "wbool", "circle", "ua", "univ"} <= families


def test_corpus_json_roundtrip():
    for name, d in build_all().items():
        blob = json.dumps(derivation_to_json(d))
        again = derivation_from_json(json.loads(blob))
        assert check_derivation(again).ok, name


def test_check_is_deterministic():
    d = build_all()["kan-hcom"]
    assert check_derivation(d) == check_derivation(d)


# ---------------------------------------------------------------------------
# Mutation fuzzing


def _term_mutants(t):
    """Single-point leaf flips that change the term's meaning."""
    out = []

    def walk(node, rebuild):
        if isinstance(node, S.True_):
            out.append(rebuild(S.FALSE))
            return
        if isinstance(node, S.False_):
            out.append(rebuild(S.TRUE))
            return
        if isinstance(node, S.Zero):
            out.append(rebuild(S.STAR))
            return
        cls = type(node)
        sig, names = SIG[cls], _FIELDS[cls]
        vals = [getattr(node, f) for f in names]
        for idx, ((kind, _), val) in enumerate(zip(sig, vals)):
            def rb(new, idx=idx):
                nv = list(vals)
                nv[idx] = new
                return rebuild(cls(*nv))

            if kind == "dim" and isinstance(val, DimConst):
                rb(DIM1 if val == DIM0 else DIM0)
            elif kind == "term":
                walk(val, rb)

    walk(t, lambda x: x)
    return out


def mutants(d: Derivation):
    """Single-point mutations of a derivation, each of which must break it."""
    rng = random.Random(0xC0FFEE)
    out = []
    claimed = d.conclusion
    from ccl.checker import expand_restriction as ex, Vacuous as Vac

    if not isinstance(ex(claimed), Vac):
        form = claimed.form
        if isinstance(form, EqTm):
            for field, val in (("lhs", form.lhs), ("rhs", form.rhs), ("ty", form.ty)):
                for m in _term_mutants(val)[:2]:
                    newform = EqTm(
                        m if field == "lhs" else form.lhs,
                        m if field == "rhs" else form.rhs,
                        m if field == "ty" else form.ty,
                    )
                    out.append(Derivation(d.rule, claimed.with_xi(claimed.xi).__class__(
                        claimed.psi, claimed.xi, claimed.hyps, newform
                    ), d.inst, d.children))
        elif isinstance(form, EqType):
            for m in _term_mutants(form.lhs)[:2]:
                out.append(Derivation(d.rule, Judgment(
                    claimed.psi, claimed.xi, claimed.hyps,
                    EqType(form.kappa, m, form.rhs)), d.inst, d.children))
            out.append(Derivation(d.rule, Judgment(
                claimed.psi, claimed.xi, claimed.hyps,
                EqType(PRE if form.kappa == KAN else KAN, form.lhs, form.rhs)),
                d.inst, d.children))
        # rule swap
        for other in rng.sample(sorted(RULES), 3):
            if other != d.rule:
                out.append(Derivation(other, claimed, d.inst, d.children))
        # child removal
        if d.children:
            out.append(Derivation(d.rule, claimed, d.inst, d.children[:-1]))
        # instantiation mutations
        for key, val in d.inst.items():
            if val in (PRE, KAN):
                out.append(Derivation(
                    d.rule, claimed,
                    {**d.inst, key: PRE if val == KAN else KAN}, d.children))
            elif isinstance(val, int):
                out.append(Derivation(
                    d.rule, claimed, {**d.inst, key: val + 1}, d.children))
            elif isinstance(val, S.Term):
                for m in _term_mutants(val)[:1]:
                    out.append(Derivation(
                        d.rule, claimed, {**d.inst, key: m}, d.children))
    return out


def all_corpus_mutants():
    out = []
    for name, d in sorted(build_all().items()):
        for m in mutants(d):
            out.append((name, m))
    return out


def test_mutation_rejection():
    cases = all_corpus_mutants()
    assert len(cases) >= 200, f"only {len(cases)} mutants generated"
    accepted = [
        name for name, m in cases if check_derivation(m).ok
    ]
    assert not accepted, f"false acceptances: {accepted}"


# ---------------------------------------------------------------------------
# Reports


def test_error_paths_point_at_the_failure():
    good = build_all()["term-transitivity"]
    # corrupt the second child's inst deep in the tree
    bad_child = Derivation(
        good.children[1].rule,
        good.children[1].conclusion,
        {**good.children[1].inst, "M": S.TRUE},
        good.children[1].children,
    )
    bad = Derivation(good.rule, good.conclusion, good.inst,
                     (good.children[0], bad_child))
    report = check_derivation(bad)
    assert not report.ok
    assert report.path[:1] == (1,)
    assert report.to_json()["ok"] is False


def test_side_condition_failure_is_named():
    ifterm = parse("if (b. bool) true false true")
    bad = Derivation(
        "comp/term",
        J(EqTm(ifterm, S.TRUE, S.BOOL)),
        {"M": ifterm, "M'": S.TRUE, "N": S.TRUE, "A": S.BOOL},
        (Derivation("bool/intro-true", J(EqTm(S.TRUE, S.TRUE, S.BOOL)), {}),),
    )
    report = check_derivation(bad)
    assert not report.ok and "side condition" in report.reason


def test_judgment_matching_ignores_hypothesis_names():
    a = J(EqTm(S.Var("a"), S.Var("a"), S.BOOL), hyps=(("a", S.BOOL),))
    b = J(EqTm(S.Var("q"), S.Var("q"), S.BOOL), hyps=(("q", S.BOOL),))
    assert judgment_matches(a, b) and judgment_matches(b, a)
    c = J(EqTm(S.TRUE, S.TRUE, S.BOOL), hyps=(("q", S.BOOL),))
    assert not judgment_matches(a, c)
