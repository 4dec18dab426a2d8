"""Term layer: free dimensions, substitution, alpha-equality, JSON."""

import pytest

from ccl.cube import DIM0, DIM1, DimName, DimSubst, ScopeError, dim_ctx
from ccl import syntax as S
from ccl.parser import parse, pretty
from ccl.syntax import (
    alpha_eq,
    apply_subst,
    dsubst,
    fd,
    fv,
    term_from_json,
    term_to_json,
    tsubst,
)


def test_fd_examples():
    assert fd(parse("loop x")) == {"x"}
    assert fd(parse("dlam x. loop x")) == frozenset()
    hc = parse("hcom bool x ~> y true [z=0 w. true]")
    assert fd(hc) == {"x", "y", "z"}


def test_fd_counts_equations_and_binders():
    assert fd(parse("fcom 0 ~> 1 true [x=y q. loop q]")) == {"x", "y"}
    assert fd(parse("box 0 ~> 1 true [x=0 (loop y)]")) == {"x", "y"}
    assert fd(parse("coe (x. loop x) y ~> 0 base")) == {"y"}


def test_dsubst_examples():
    assert dsubst(parse("loop x"), DIM0, "x") == parse("loop 0")
    out = dsubst(parse("dlam y. dapp p0 x"), DimName("y"), "x")
    # capture avoided: the binder is renamed away from the substituted y
    assert isinstance(out, S.DLam)
    assert out.dvar != "y"
    assert out.body == S.DApp(S.Var("p0"), DimName("y"))
    v = parse("V x bool nat zero")
    assert dsubst(v, DIM0, "x") == parse("V 0 bool nat zero")


def test_dsubst_identity():
    for src in ["loop x", "dlam y. loop x", "hcom bool x ~> x true [x=0 y. true]"]:
        m = parse(src)
        assert alpha_eq(dsubst(m, DimName("x"), "x"), m)


def test_tsubst_examples():
    assert tsubst(S.Var("a"), S.ZERO, "a") == S.ZERO
    assert tsubst(parse("lam a. a"), S.ZERO, "a") == parse("lam a. a")
    assert tsubst(S.Suc(S.Var("a")), S.ZERO, "a") == parse("suc zero")


def test_tsubst_avoids_dimension_capture():
    host = S.DLam("w", S.App(S.Var("f"), S.Var("a")))
    out = tsubst(host, parse("loop w"), "a")
    assert out.dvar != "w"
    assert out.body == S.App(S.Var("f"), parse("loop w"))


def test_tsubst_avoids_term_capture():
    host = S.Lam("b", S.App(S.Var("b"), S.Var("a")))
    out = tsubst(host, S.Var("b"), "a")
    assert out.var != "b"
    assert out.body == S.App(S.Var(out.var), S.Var("b"))


def test_apply_subst_examples():
    psi = DimSubst(dim_ctx("x"), dim_ctx(""), {"x": DIM0})
    assert apply_subst(parse("loop x"), psi) == parse("loop 0")
    m = parse("dlam x. loop x")
    ident = DimSubst(dim_ctx(""), dim_ctx(""), {})
    assert alpha_eq(apply_subst(m, ident), m)
    psi2 = DimSubst(dim_ctx("x"), dim_ctx("y"), {"x": DimName("y")})
    assert apply_subst(parse("dapp m0 x"), psi2) == parse("dapp m0 y")


def test_apply_subst_requires_scope():
    psi = DimSubst(dim_ctx("x"), dim_ctx(""), {"x": DIM0})
    with pytest.raises(ScopeError):
        apply_subst(parse("loop y"), psi)


def test_apply_subst_agrees_with_iterated_dsubst():
    m = parse("hcom bool x ~> y (loop x) [x=y w. loop w]")
    psi = DimSubst(dim_ctx("xy"), dim_ctx("z"), {"x": DimName("z"), "y": DIM1})
    stepwise = dsubst(dsubst(m, DimName("z"), "x"), DIM1, "y")
    assert alpha_eq(apply_subst(m, psi), stepwise)


def test_alpha_examples():
    assert alpha_eq(parse("lam a. a"), parse("lam b. b"))
    assert alpha_eq(parse("dlam x. loop x"), parse("dlam y. loop y"))
    assert not alpha_eq(parse("loop x"), parse("loop y"))


def test_alpha_distinguishes_structure():
    assert not alpha_eq(parse("lam a. a"), parse("lam a. true"))
    assert not alpha_eq(parse("U kan 1"), parse("U kan 2"))
    assert not alpha_eq(parse("U kan 1"), parse("U pre 1"))
    assert not alpha_eq(
        parse("fcom 0 ~> 1 true [x=0 y. true]"),
        parse("fcom 0 ~> 1 true [x=1 y. true]"),
    )
    assert not alpha_eq(
        parse("fcom 0 ~> 1 true [x=0 y. true]"),
        parse("fcom 0 ~> 1 true [x=0 y. true] [x=1 y. true]"),
    )


def test_alpha_respects_binding_not_names():
    # same printed names, different binding structure
    assert not alpha_eq(parse("dlam x. loop y"), parse("dlam y. loop y"))
    assert alpha_eq(parse("dlam x. loop y"), parse("dlam w. loop y"))


def test_intentional_capture_construction():
    # building a binder over a body with free occurrences binds them
    body = parse("loop w")
    tube = S.Tube(S.Equation(DIM0, DIM0), "w", body)
    hc = S.Hcom(S.CIRCLE, DIM0, DIM1, S.Base(), (tube,))
    assert "w" not in fd(hc)


def test_json_roundtrip_examples():
    for src in [
        "lam a. a",
        "hcom (V x bool nat zero) 0 ~> 1 true [x=0 y. true]",
        "box 0 ~> 1 true [x=0 false]",
        "natrec (suc zero) zero (n a. suc (suc a))",
        "S1elim (c. eq S1 c c) base zero (q. true)",
        "U kan 3",
    ]:
        m = parse(src)
        assert term_from_json(term_to_json(m)) == m


def test_json_rejects_garbage():
    with pytest.raises(ValueError):
        term_from_json({"t": "NoSuch", "f": []})
    with pytest.raises(ValueError):
        term_from_json({"t": "App", "f": []})


def test_fv():
    assert fv(parse("app f0 (lam a. a)")) == {"f0"}
    assert fv(parse("lam a. a")) == frozenset()
    assert fv(S.NatRec(S.ZERO, S.Var("z0"), "n", "a", S.Var("n"))) == {"z0"}
