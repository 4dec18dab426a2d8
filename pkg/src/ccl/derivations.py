"""A hand-built corpus of derivations spanning the whole rule catalog.

Each builder returns a checkable derivation tree; ``build_all`` collects them
by name.  The trees dump to JSON for the file-based checking interface.
"""

from __future__ import annotations

import json
from pathlib import Path as FsPath

from .cube import DIM0, DIM1, DimName, DimSubst, Equation
from . import syntax as S
from .parser import parse
from .checker import (
    KAN,
    PRE,
    Derivation,
    EqTm,
    EqType,
    Judgment,
    WfShape,
    derivation_to_json,
)

X = DimName("x")
W = DimName("w")


def J(form, psi=(), hyps=(), xi=()) -> Judgment:
    return Judgment(frozenset(psi), tuple(xi), tuple(hyps), form)


def oftm(m, ty, **kw) -> Judgment:
    return J(EqTm(m, m, ty), **kw)


def wfty(kappa, ty, **kw) -> Judgment:
    return J(EqType(kappa, ty, ty), **kw)


def node(rule: str, concl: Judgment, inst: dict | None = None, *children) -> Derivation:
    return Derivation(rule, concl, inst or {}, tuple(children))


# -- leaves used throughout ---------------------------------------------------

def bool_form(psi=()) -> Derivation:
    return node("bool/form-kan", wfty(KAN, S.BOOL, psi=psi), {"psi": psi})


def true_intro(psi=()) -> Derivation:
    return node("bool/intro-true", oftm(S.TRUE, S.BOOL, psi=psi), {"psi": psi})


def false_intro(psi=()) -> Derivation:
    return node("bool/intro-false", oftm(S.FALSE, S.BOOL, psi=psi), {"psi": psi})


def circle_form(psi=()) -> Derivation:
    return node("circle/form-kan", wfty(KAN, S.CIRCLE, psi=psi), {"psi": psi})


def base_intro(psi=()) -> Derivation:
    return node("circle/intro-base", oftm(S.Base(), S.CIRCLE, psi=psi), {"psi": psi})


IDFUN = parse("lam a. a")
IFTERM = parse("if (b. bool) true false true")
SNDTERM = parse("snd (pair true false)")
BOOL_TO_BOOL = S.arrow(S.BOOL, S.BOOL)
V0 = S.V(DIM0, S.BOOL, S.BOOL, IDFUN)  # V 0 bool bool (lam a. a)
PI_BB = S.Pi("a", S.BOOL, S.BOOL)


def comp_term(m, m2, ty, child, psi=()) -> Derivation:
    """m steps stably to m2; conclude m = m2 ... : ty from child."""
    return node(
        "comp/term",
        J(EqTm(m, child.conclusion.form.rhs, ty), psi=psi),
        {"M": m, "M'": m2, "N": child.conclusion.form.rhs, "A": ty, "psi": psi},
        child,
    )


# -- the corpus ---------------------------------------------------------------


def d_bool_form() -> Derivation:
    return bool_form()


def d_true_intro() -> Derivation:
    return true_intro()


def d_hypothesis() -> Derivation:
    gamma = (("a", S.BOOL),)
    return node(
        "struct/hypothesis",
        J(EqTm(S.Var("a"), S.Var("a"), S.BOOL), hyps=gamma),
        {"k": 0, "kappa": KAN, "gamma": gamma},
        bool_form(),
    )


def d_weakening() -> Derivation:
    base = true_intro()
    return node(
        "struct/weakening",
        J(EqTm(S.TRUE, S.TRUE, S.BOOL), hyps=(("a", S.BOOL),)),
        {"J": base.conclusion, "k": 0, "a": "a", "A": S.BOOL, "kappa": KAN},
        base,
        bool_form(),
    )


def d_dsubst() -> Derivation:
    loop_x = S.Loop(X)
    base = node(
        "circle/intro-loop", oftm(loop_x, S.CIRCLE, psi=("x",)), {"r": X, "psi": ("x",)}
    )
    sub = DimSubst(frozenset({"x"}), frozenset(), {"x": DIM0})
    return node(
        "struct/dsubst",
        oftm(S.Loop(DIM0), S.CIRCLE),
        {"J": base.conclusion, "sub": sub},
        base,
    )


def d_ua_form_zero() -> Derivation:
    return node(
        "ua/form-zero",
        J(EqType(KAN, V0, S.BOOL)),
        {"kappa": KAN, "A": S.BOOL, "B": S.BOOL, "E": IDFUN},
        bool_form(),
    )


def d_type_sym() -> Derivation:
    fwd = d_ua_form_zero()
    return node(
        "struct/type-sym",
        J(EqType(KAN, S.BOOL, V0)),
        {"kappa": KAN, "A": V0, "A'": S.BOOL},
        fwd,
    )


def d_kan_pre() -> Derivation:
    return node(
        "struct/kan-pre",
        J(EqType(PRE, S.BOOL, S.BOOL)),
        {"A": S.BOOL, "A'": S.BOOL},
        bool_form(),
    )


def d_comp_term() -> Derivation:
    return comp_term(IFTERM, S.FALSE, S.BOOL, false_intro())


def d_comp_type() -> Derivation:
    return node(
        "comp/type",
        J(EqType(KAN, V0, S.BOOL)),
        {"kappa": KAN, "A": V0, "A'": S.BOOL, "B": S.BOOL},
        bool_form(),
    )


def d_term_sym() -> Derivation:
    fwd = comp_term(SNDTERM, S.FALSE, S.BOOL, false_intro())
    return node(
        "struct/term-sym",
        J(EqTm(S.FALSE, SNDTERM, S.BOOL)),
        {"M": S.FALSE, "M'": SNDTERM, "A": S.BOOL},
        fwd,
    )


def d_term_trans() -> Derivation:
    left = d_comp_term()  # if ... = false
    right = d_term_sym()  # false = snd (pair true false)
    return node(
        "struct/term-trans",
        J(EqTm(IFTERM, SNDTERM, S.BOOL)),
        {"M": IFTERM, "M'": S.FALSE, "M''": SNDTERM, "A": S.BOOL},
        left,
        right,
    )


def d_conversion() -> Derivation:
    return node(
        "struct/conversion",
        J(EqTm(S.TRUE, S.TRUE, V0)),
        {"kappa": KAN, "M": S.TRUE, "M'": S.TRUE, "A": S.BOOL, "A'": V0},
        true_intro(),
        d_type_sym(),
    )


def d_subst_type() -> Derivation:
    weakened = node(
        "struct/weakening",
        wfty(KAN, S.BOOL, hyps=(("a", S.BOOL),)),
        {"J": wfty(KAN, S.BOOL), "k": 0, "a": "a", "A": S.BOOL, "kappa": KAN},
        bool_form(),
        bool_form(),
    )
    return node(
        "struct/subst-type",
        wfty(KAN, S.BOOL),
        {"kappa": KAN, "a": "a", "A": S.BOOL, "B": S.BOOL, "B'": S.BOOL,
         "N": S.TRUE, "N'": S.TRUE},
        weakened,
        true_intro(),
    )


def d_subst_term() -> Derivation:
    return node(
        "struct/subst-term",
        oftm(S.TRUE, S.BOOL),
        {"a": "a", "A": S.BOOL, "M": S.Var("a"), "M'": S.Var("a"), "B": S.BOOL,
         "N": S.TRUE, "N'": S.TRUE},
        d_hypothesis(),
        true_intro(),
    )


def d_restrict_empty() -> Derivation:
    return node(
        "restrict/empty", oftm(S.TRUE, S.BOOL), {"J": oftm(S.TRUE, S.BOOL)}, true_intro()
    )


def d_restrict_eps_eq() -> Derivation:
    base = true_intro()
    return node(
        "restrict/eps-eq",
        oftm(S.TRUE, S.BOOL, xi=(Equation(DIM0, DIM0),)),
        {"J": base.conclusion, "eps": DIM0},
        base,
    )


def d_restrict_eps_neq() -> Derivation:
    j = J(EqTm(S.TRUE, S.FALSE, S.BOOL))
    return node(
        "restrict/eps-neq",
        j.with_xi((Equation(DIM0, DIM1),)),
        {"J": j, "eps": DIM0},
    )


def d_restrict_subst() -> Derivation:
    j = J(EqTm(S.Loop(X), S.Base(), S.CIRCLE), psi=("x",))
    loop0 = node(
        "circle/loop-eps",
        J(EqTm(S.Loop(DIM0), S.Base(), S.CIRCLE)),
        {"eps": DIM0},
    )
    return node(
        "restrict/subst",
        j.with_xi((Equation(X, DIM0),)),
        {"J": j, "x": "x", "r": DIM0},
        loop0,
    )


def d_shape_refl() -> Derivation:
    eqs = (Equation(X, X),)
    return node(
        "kan/shape-refl",
        J(WfShape(eqs), psi=("x",)),
        {"eqs": eqs, "i": 0, "psi": ("x",)},
    )


def d_shape_opposed() -> Derivation:
    eqs = (Equation(X, DIM0), Equation(X, DIM1))
    return node(
        "kan/shape-opposed",
        J(WfShape(eqs), psi=("x",)),
        {"eqs": eqs, "i": 0, "j": 1, "psi": ("x",)},
    )


def d_kan_hcom() -> Derivation:
    eqs = (Equation(X, X),)
    hc = S.Hcom(S.BOOL, DIM0, DIM1, S.TRUE, (S.Tube(eqs[0], "y", S.TRUE),))
    return node(
        "kan/hcom",
        J(EqTm(hc, hc, S.BOOL), psi=("x",)),
        {"A": S.BOOL, "A'": S.BOOL, "r": DIM0, "r'": DIM1, "M": S.TRUE,
         "M'": S.TRUE, "y": "y", "eqs": eqs, "N": (S.TRUE,), "N'": (S.TRUE,),
         "psi": ("x",)},
        d_shape_refl(),
        bool_form(psi=("x",)),
        true_intro(psi=("x",)),
        true_intro(psi=("x", "y")),
        true_intro(psi=("x",)),
    )


def d_kan_coe() -> Derivation:
    co = S.Coe("x", S.BOOL, DIM0, DIM1, S.TRUE)
    return node(
        "kan/coe",
        J(EqTm(co, co, S.BOOL)),
        {"x": "x", "A": S.BOOL, "A'": S.BOOL, "r": DIM0, "r'": DIM1,
         "M": S.TRUE, "M'": S.TRUE, "psi": ()},
        bool_form(psi=("x",)),
        true_intro(),
    )


def d_kan_com() -> Derivation:
    eqs = (Equation(DIM0, DIM0),)
    cm = S.Com("y", S.BOOL, DIM0, DIM1, S.TRUE, (S.Tube(eqs[0], "y", S.TRUE),))
    shape = node("kan/shape-refl", J(WfShape(eqs)), {"eqs": eqs, "i": 0, "psi": ()})
    return node(
        "kan/com",
        J(EqTm(cm, cm, S.BOOL)),
        {"y": "y", "A": S.BOOL, "A'": S.BOOL, "r": DIM0, "r'": DIM1,
         "M": S.TRUE, "M'": S.TRUE, "eqs": eqs, "N": (S.TRUE,), "N'": (S.TRUE,),
         "psi": ()},
        shape,
        bool_form(psi=("y",)),
        true_intro(),
        true_intro(psi=("y",)),
        true_intro(),
    )


def d_fun_form() -> Derivation:
    weakened = node(
        "struct/weakening",
        wfty(KAN, S.BOOL, hyps=(("a", S.BOOL),)),
        {"J": wfty(KAN, S.BOOL), "k": 0, "a": "a", "A": S.BOOL, "kappa": KAN},
        bool_form(),
        bool_form(),
    )
    return node(
        "fun/form",
        wfty(KAN, PI_BB),
        {"kappa": KAN, "a": "a", "A": S.BOOL, "A'": S.BOOL, "B": S.BOOL, "B'": S.BOOL},
        bool_form(),
        weakened,
    )


def d_fun_intro(var: str = "a") -> Derivation:
    gamma = ((var, S.BOOL),)
    hyp = node(
        "struct/hypothesis",
        J(EqTm(S.Var(var), S.Var(var), S.BOOL), hyps=gamma),
        {"k": 0, "kappa": KAN, "gamma": gamma},
        bool_form(),
    )
    lam = S.Lam(var, S.Var(var))
    return node(
        "fun/intro",
        oftm(lam, S.Pi(var, S.BOOL, S.BOOL)),
        {"a": var, "A": S.BOOL, "B": S.BOOL, "M": S.Var(var), "M'": S.Var(var)},
        hyp,
    )


def d_fun_elim() -> Derivation:
    app = S.App(IDFUN, S.TRUE)
    return node(
        "fun/elim",
        oftm(app, S.BOOL),
        {"a": "a", "A": S.BOOL, "B": S.BOOL, "M": IDFUN, "M'": IDFUN,
         "N": S.TRUE, "N'": S.TRUE},
        d_fun_intro(),
        true_intro(),
    )


def d_fun_beta() -> Derivation:
    return node(
        "fun/beta",
        J(EqTm(S.App(IDFUN, S.TRUE), S.TRUE, S.BOOL)),
        {"a": "a", "A": S.BOOL, "B": S.BOOL, "M": S.Var("a"), "N": S.TRUE},
        d_hypothesis(),
        true_intro(),
    )


def d_fun_eta() -> Derivation:
    return node(
        "fun/eta",
        J(EqTm(IDFUN, S.Lam("a", S.App(IDFUN, S.Var("a"))), PI_BB)),
        {"a": "a", "A": S.BOOL, "B": S.BOOL, "M": IDFUN},
        d_fun_intro(),
    )


def d_pair_intro() -> Derivation:
    pr = S.Pair(S.TRUE, S.FALSE)
    return node(
        "pair/intro",
        oftm(pr, S.Sg("a", S.BOOL, S.BOOL)),
        {"a": "a", "A": S.BOOL, "B": S.BOOL, "M": S.TRUE, "M'": S.TRUE,
         "N": S.FALSE, "N'": S.FALSE},
        true_intro(),
        false_intro(),
    )


def d_pair_fst_beta() -> Derivation:
    return node(
        "pair/fst-beta",
        J(EqTm(S.Fst(S.Pair(S.TRUE, S.FALSE)), S.TRUE, S.BOOL)),
        {"M": S.TRUE, "N": S.FALSE, "A": S.BOOL},
        true_intro(),
    )


def d_path_intro() -> Derivation:
    refl = S.DLam("x", S.Base())
    ty = S.Path("x", S.CIRCLE, S.Base(), S.Base())
    return node(
        "path/intro",
        oftm(refl, ty),
        {"x": "x", "A": S.CIRCLE, "M": S.Base(), "M'": S.Base(),
         "P0": S.Base(), "P1": S.Base(), "psi": ()},
        base_intro(psi=("x",)),
        base_intro(),
        base_intro(),
    )


def d_path_beta() -> Derivation:
    loop_line = S.DLam("x", S.Loop(X))
    loop_x = node(
        "circle/intro-loop", oftm(S.Loop(X), S.CIRCLE, psi=("x",)), {"r": X, "psi": ("x",)}
    )
    return node(
        "path/beta",
        J(EqTm(S.DApp(loop_line, DIM0), S.Loop(DIM0), S.CIRCLE)),
        {"x": "x", "A": S.CIRCLE, "M": S.Loop(X), "r": DIM0, "psi": ()},
        loop_x,
    )


def d_eq_intro() -> Derivation:
    return node(
        "eq/intro",
        oftm(S.STAR, S.Eq(S.BOOL, S.TRUE, S.TRUE)),
        {"A": S.BOOL, "M": S.TRUE, "N": S.TRUE},
        true_intro(),
    )


def d_eq_reflection() -> Derivation:
    return node(
        "eq/reflection",
        J(EqTm(S.TRUE, S.TRUE, S.BOOL)),
        {"A": S.BOOL, "M": S.TRUE, "N": S.TRUE, "E": S.STAR},
        d_eq_intro(),
    )


def d_void_form() -> Derivation:
    return node("void/form", wfty(KAN, S.VOID))


def d_void_elim() -> Derivation:
    gamma = (("v", S.VOID),)
    hyp = node(
        "struct/hypothesis",
        J(EqTm(S.Var("v"), S.Var("v"), S.VOID), hyps=gamma),
        {"k": 0, "kappa": KAN, "gamma": gamma},
        node("void/form", wfty(KAN, S.VOID)),
    )
    absurd = J(EqTm(S.TRUE, S.FALSE, S.BOOL), hyps=gamma)
    return node(
        "void/elim", absurd, {"M": S.Var("v"), "J": absurd, "gamma": gamma}, hyp
    )


def d_nat_intro_suc() -> Derivation:
    z = node("nat/intro-zero", oftm(S.ZERO, S.NAT))
    return node(
        "nat/intro-suc",
        oftm(S.Suc(S.ZERO), S.NAT),
        {"M": S.ZERO, "M'": S.ZERO},
        z,
    )


def d_nat_beta_zero() -> Derivation:
    rec = S.NatRec(S.ZERO, S.ZERO, "n", "acc", S.Suc(S.Var("acc")))
    z = node("nat/intro-zero", oftm(S.ZERO, S.NAT))
    return node(
        "nat/beta-zero",
        J(EqTm(rec, S.ZERO, S.NAT)),
        {"n": "n", "a": "acc", "Z": S.ZERO, "St": S.Suc(S.Var("acc")), "A": S.NAT},
        z,
    )


def d_bool_elim() -> Derivation:
    pre_bool = node(
        "struct/kan-pre", J(EqType(PRE, S.BOOL, S.BOOL)),
        {"A": S.BOOL, "A'": S.BOOL}, bool_form(),
    )
    weakened = node(
        "struct/weakening",
        wfty(PRE, S.BOOL, hyps=(("b", S.BOOL),)),
        {"J": wfty(PRE, S.BOOL), "k": 0, "a": "b", "A": S.BOOL, "kappa": PRE},
        pre_bool,
        pre_bool,
    )
    ift = S.If("b", S.BOOL, S.TRUE, S.FALSE, S.TRUE)
    return node(
        "bool/elim",
        oftm(ift, S.BOOL),
        {"b": "b", "A": S.BOOL, "A'": S.BOOL, "C": S.BOOL, "M": S.TRUE,
         "M'": S.TRUE, "T": S.FALSE, "T'": S.FALSE, "F": S.TRUE, "F'": S.TRUE},
        weakened,
        true_intro(),
        false_intro(),
        true_intro(),
    )


def d_bool_beta_true() -> Derivation:
    return node(
        "bool/beta-true",
        J(EqTm(IFTERM, S.FALSE, S.BOOL)),
        {"b": "b", "A": S.BOOL, "B": S.BOOL, "T": S.FALSE, "F": S.TRUE},
        false_intro(),
    )


def d_wbool_from_bool() -> Derivation:
    return node(
        "wbool/from-bool",
        oftm(S.TRUE, S.WBOOL),
        {"M": S.TRUE, "M'": S.TRUE},
        true_intro(),
    )


def d_circle_beta_base() -> Derivation:
    celim = S.CircElim("c", S.CIRCLE, S.Base(), S.Base(), "x", S.Loop(X))
    return node(
        "circle/beta-base",
        J(EqTm(celim, S.Base(), S.CIRCLE)),
        {"c": "c", "A": S.CIRCLE, "P": S.Base(), "x": "x", "L": S.Loop(X),
         "B": S.CIRCLE, "psi": ()},
        base_intro(),
    )


def d_circle_beta_loop() -> Derivation:
    celim = S.CircElim("c", S.CIRCLE, S.Loop(W), S.Base(), "x", S.Loop(X))
    loop_x = node(
        "circle/intro-loop", oftm(S.Loop(X), S.CIRCLE, psi=("x", "w")),
        {"r": X, "psi": ("x", "w")},
    )
    eps_children = [
        node(
            "circle/loop-eps",
            J(EqTm(S.Loop(eps), S.Base(), S.CIRCLE), psi=("w",)),
            {"eps": eps, "psi": ("w",)},
        )
        for eps in (DIM0, DIM1)
    ]
    return node(
        "circle/beta-loop",
        J(EqTm(celim, S.Loop(W), S.CIRCLE), psi=("w",)),
        {"c": "c", "A": S.CIRCLE, "P": S.Base(), "x": "x", "L": S.Loop(X),
         "B": S.CIRCLE, "r": W, "psi": ("w",)},
        loop_x,
        *eps_children,
    )


def d_ua_intro_zero() -> Derivation:
    return node(
        "ua/intro-zero",
        J(EqTm(S.Vin(DIM0, S.TRUE, S.FALSE), S.TRUE, S.BOOL)),
        {"M": S.TRUE, "N": S.FALSE, "A": S.BOOL},
        true_intro(),
    )


def d_ua_elim_zero() -> Derivation:
    idfun = S.Lam("_a", S.Var("_a"))
    vp = S.Vproj(DIM0, S.TRUE, idfun)
    return node(
        "ua/elim-zero",
        J(EqTm(vp, S.App(idfun, S.TRUE), S.BOOL)),
        {"A": S.BOOL, "B": S.BOOL, "M": S.TRUE, "F": idfun},
        true_intro(),
        d_fun_intro("_a"),
    )


def d_univ_bool() -> Derivation:
    return node(
        "univ/bool", oftm(S.BOOL, S.UKan(0)), {"kappa": KAN, "j": 0}
    )


def d_univ_el() -> Derivation:
    return node(
        "univ/el",
        wfty(KAN, S.BOOL),
        {"kappa": KAN, "j": 0, "A": S.BOOL, "A'": S.BOOL},
        d_univ_bool(),
    )


def d_univ_cumulativity() -> Derivation:
    return node(
        "univ/cumulativity",
        oftm(S.BOOL, S.UKan(2)),
        {"kappa": KAN, "i": 0, "j": 2, "A": S.BOOL, "A'": S.BOOL},
        d_univ_bool(),
    )


def d_univ_kan_in_kan() -> Derivation:
    return node(
        "univ/kan-in-kan", oftm(S.UKan(0), S.UKan(1)), {"i": 0, "j": 1}
    )


def d_univ_box_cap_eq() -> Derivation:
    bx = S.Box(DIM0, DIM0, S.TRUE, ())
    return node(
        "univ/box-cap-eq",
        J(EqTm(bx, S.TRUE, S.BOOL)),
        {"r": DIM0, "M": S.TRUE, "A": S.BOOL, "eqs": (), "N": ()},
        true_intro(),
    )


def d_univ_box() -> Derivation:
    eqs = (Equation(X, X),)
    coe_back = S.Coe("y", S.BOOL, DIM1, DIM0, S.TRUE)
    box = S.Box(DIM0, DIM1, S.TRUE, (S.Face(eqs[0], S.TRUE),))
    ty = S.Hcom(S.UKan(0), DIM0, DIM1, S.BOOL, (S.Tube(eqs[0], "y", S.BOOL),))
    shape = node(
        "kan/shape-refl", J(WfShape(eqs), psi=("x",)), {"eqs": eqs, "i": 0, "psi": ("x",)}
    )
    coe_cap = node(
        "comp/term",
        J(EqTm(coe_back, S.TRUE, S.BOOL), psi=("x",)),
        {"M": coe_back, "M'": S.TRUE, "N": S.TRUE, "A": S.BOOL, "psi": ("x",)},
        true_intro(psi=("x",)),
    )
    return node(
        "univ/box",
        J(EqTm(box, box, ty), psi=("x",)),
        {"j": 0, "r": DIM0, "r'": DIM1, "A": S.BOOL, "M": S.TRUE, "M'": S.TRUE,
         "y": "y", "eqs": eqs, "B": (S.BOOL,), "N": (S.TRUE,), "N'": (S.TRUE,),
         "psi": ("x",)},
        shape,
        bool_form(psi=("x",)),
        true_intro(psi=("x",)),
        bool_form(psi=("x", "y")),
        bool_form(psi=("x",)),
        true_intro(psi=("x",)),
        coe_cap,
    )


def d_univ_cap_eq() -> Derivation:
    cp = S.Cap(DIM1, DIM1, S.TRUE, ())
    return node(
        "univ/cap-eq",
        J(EqTm(cp, S.TRUE, S.BOOL)),
        {"r": DIM1, "M": S.TRUE, "A": S.BOOL, "y": "y", "eqs": (), "B": ()},
        true_intro(),
    )


def build_all() -> dict[str, Derivation]:
    """The named derivation corpus (every tree checks)."""
    builders = {
        "bool-form": d_bool_form,
        "true-intro": d_true_intro,
        "hypothesis": d_hypothesis,
        "weakening": d_weakening,
        "dim-subst-instance": d_dsubst,
        "kan-type-is-pretype": d_kan_pre,
        "type-symmetry": d_type_sym,
        "term-symmetry": d_term_sym,
        "term-transitivity": d_term_trans,
        "conversion": d_conversion,
        "subst-into-type": d_subst_type,
        "subst-into-term": d_subst_term,
        "restrict-empty": d_restrict_empty,
        "restrict-reflexive": d_restrict_eps_eq,
        "restrict-clash": d_restrict_eps_neq,
        "restrict-name": d_restrict_subst,
        "compute-term": d_comp_term,
        "compute-type": d_comp_type,
        "shape-reflexive": d_shape_refl,
        "shape-opposed": d_shape_opposed,
        "kan-hcom": d_kan_hcom,
        "kan-coe": d_kan_coe,
        "kan-com": d_kan_com,
        "fun-form": d_fun_form,
        "fun-intro": d_fun_intro,
        "fun-elim": d_fun_elim,
        "fun-beta": d_fun_beta,
        "fun-eta": d_fun_eta,
        "pair-intro": d_pair_intro,
        "pair-fst-beta": d_pair_fst_beta,
        "path-intro": d_path_intro,
        "path-beta": d_path_beta,
        "eq-intro": d_eq_intro,
        "eq-reflection": d_eq_reflection,
        "void-form": d_void_form,
        "void-elim": d_void_elim,
        "ua-form-zero": d_ua_form_zero,
        "ua-intro-zero": d_ua_intro_zero,
        "ua-elim-zero": d_ua_elim_zero,
        "nat-intro-suc": d_nat_intro_suc,
        "nat-beta-zero": d_nat_beta_zero,
        "bool-elim": d_bool_elim,
        "bool-beta-true": d_bool_beta_true,
        "wbool-from-bool": d_wbool_from_bool,
        "circle-beta-base": d_circle_beta_base,
        "circle-beta-loop": d_circle_beta_loop,
        "univ-bool": d_univ_bool,
        "univ-el": d_univ_el,
        "univ-cumulativity": d_univ_cumulativity,
        "univ-kan-in-kan": d_univ_kan_in_kan,
        "univ-box-cap-eq": d_univ_box_cap_eq,
        "univ-cap-eq": d_univ_cap_eq,
        "univ-box": d_univ_box,
    }
    return {name: fn() for name, fn in builders.items()}


def write_corpus(directory) -> list[str]:
    """Serialize the corpus as one JSON file per derivation."""
    directory = FsPath(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name, deriv in sorted(build_all().items()):
        path = directory / f"{name}.json"
        path.write_text(json.dumps(derivation_to_json(deriv), indent=1))
        written.append(str(path))
    return written


if __name__ == "__main__":  # pragma: no cover
    import sys

    out = sys.argv[1] if len(sys.argv) > 1 else "derivations"
    for p in write_corpus(out):
        print(p)
