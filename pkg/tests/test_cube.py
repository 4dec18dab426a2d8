"""Dimension layer: substitution, composition, satisfaction, validity."""

import pytest

from ccl.cube import (
    DIM0,
    DIM1,
    DimName,
    DimSubst,
    Equation,
    ScopeError,
    apply_dim,
    compose_subst,
    dim_ctx,
    eqs,
    fresh_name,
    identity_subst,
    print_equations,
    satisfies,
    valid,
)

X, Y, Z = DimName("x"), DimName("y"), DimName("z")


def subst(source, target, mapping):
    return DimSubst(dim_ctx(source), dim_ctx(target), mapping)


def test_apply_dim_examples():
    assert apply_dim(subst("x", "", {"x": DIM0}), X) == DIM0
    assert apply_dim(subst("x", "y", {"x": Y}), DIM1) == DIM1
    assert apply_dim(subst("xy", "z", {"x": Z, "y": Z}), Y) == Z


def test_apply_dim_requires_scope():
    with pytest.raises(ScopeError):
        apply_dim(subst("x", "", {"x": DIM0}), Y)


def test_compose_examples():
    p1 = subst("x", "y", {"x": Y})
    p2 = subst("y", "", {"y": DIM0})
    assert compose_subst(p1, p2).map == {"x": DIM0}
    ident = identity_subst(dim_ctx("x"))
    p = subst("x", "yz", {"x": Y})
    assert compose_subst(ident, p).map == p.map
    one = subst("x", "z", {"x": DIM1})
    assert compose_subst(one, identity_subst(dim_ctx("z"))).map == {"x": DIM1}


def test_compose_context_mismatch():
    with pytest.raises(ScopeError):
        compose_subst(subst("x", "y", {"x": Y}), subst("z", "", {"z": DIM0}))


def test_satisfies_examples():
    assert satisfies(subst("x", "", {"x": DIM0}), eqs((X, DIM0)))
    assert not satisfies(identity_subst(dim_ctx("xy")), eqs((X, Y)))
    assert satisfies(subst("xy", "z", {"x": Z, "y": Z}), eqs((X, Y)))


def test_satisfies_is_unoriented():
    psi = subst("x", "", {"x": DIM1})
    assert satisfies(psi, eqs((X, DIM1)))
    assert satisfies(psi, eqs((DIM1, X)))


def test_satisfies_scope_error():
    with pytest.raises(ScopeError):
        satisfies(subst("x", "", {"x": DIM0}), eqs((Y, DIM0)))


def test_valid_examples():
    assert valid(eqs((X, DIM0), (X, DIM1)))  # opposing pair on x
    assert valid(eqs((DIM0, DIM0)))  # reflexive
    assert not valid(eqs((X, Y)))


def test_valid_orientation_matters_for_opposing_pair():
    # The clause inspects written sides: both equations must share a left side.
    assert not valid(eqs((DIM0, X), (X, DIM1)))
    assert valid(eqs((X, DIM0), (X, DIM1)))


def test_valid_is_order_insensitive():
    pairs = [(X, DIM0), (Y, Z), (X, DIM1)]
    import itertools

    answers = {valid(eqs(*perm)) for perm in itertools.permutations(pairs)}
    assert answers == {True}


def test_functoriality_on_all_small_substitutions():
    names = ["x", "y"]
    dims = [DIM0, DIM1, DimName("u"), DimName("v")]
    targets = dim_ctx("uv")
    import itertools

    for m1 in itertools.product(dims, repeat=2):
        p1 = DimSubst(dim_ctx(names), targets, dict(zip(names, m1)))
        for m2 in itertools.product([DIM0, DIM1, DimName("w")], repeat=2):
            p2 = DimSubst(targets, dim_ctx("w"), dict(zip("uv", m2)))
            comp = compose_subst(p1, p2)
            for r in [DIM0, DIM1, X, Y]:
                assert apply_dim(comp, r) == apply_dim(p2, apply_dim(p1, r))


def test_satisfaction_stability_under_composition():
    xi = eqs((X, Y), (Y, DIM1))
    p1 = subst("xy", "uv", {"x": DimName("u"), "y": DimName("u")})
    import itertools

    if satisfies(p1, eqs((X, Y))):
        for m2 in itertools.product([DIM0, DIM1, DimName("w")], repeat=2):
            p2 = DimSubst(dim_ctx("uv"), dim_ctx("w"), dict(zip("uv", m2)))
            assert satisfies(compose_subst(p1, p2), eqs((X, Y)))


def test_totality_enforced():
    with pytest.raises(ScopeError):
        DimSubst(dim_ctx("xy"), dim_ctx(""), {"x": DIM0})
    with pytest.raises(ScopeError):
        DimSubst(dim_ctx("x"), dim_ctx(""), {"x": Y})


def test_fresh_name_bumps_past_max():
    assert fresh_name("x", set()) == "x"
    assert fresh_name("x", {"x"}) == "x1"
    assert fresh_name("x", {"x", "x1", "x7"}) == "x8"
    assert fresh_name("y2", {"y2", "y5"}) == "y6"


def test_equation_printing():
    assert print_equations(eqs((X, DIM0), (Y, Z))) == "x=0, y=z"
