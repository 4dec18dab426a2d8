"""Dimension expressions, contexts, substitutions, and equation shapes.

The dimension layer is Cartesian: a dimension is a constant endpoint (0 or 1)
or an atomic name.  There are no connections or reversals, so the only
operations are total substitutions between dimension contexts and syntactic
comparison of dimensions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping


class ScopeError(Exception):
    """An ill-scoped dimension, term, or substitution was supplied."""


# ---------------------------------------------------------------------------
# Dimensions


@dataclass(frozen=True)
class Dim:
    """Base class for dimension expressions."""

    def __str__(self) -> str:  # pragma: no cover - overridden
        raise NotImplementedError


@dataclass(frozen=True)
class DimConst(Dim):
    value: int  # 0 or 1

    def __post_init__(self):
        if self.value not in (0, 1):
            raise ValueError(f"dimension constant must be 0 or 1, got {self.value}")

    def __str__(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class DimName(Dim):
    name: str

    def __str__(self) -> str:
        return self.name


DIM0 = DimConst(0)
DIM1 = DimConst(1)


def dim_flip(eps: Dim) -> Dim:
    """The opposite endpoint of a dimension constant."""
    if eps == DIM0:
        return DIM1
    if eps == DIM1:
        return DIM0
    raise ValueError(f"not a dimension constant: {eps}")


def parse_dim(text: str) -> Dim:
    text = text.strip()
    if text == "0":
        return DIM0
    if text == "1":
        return DIM1
    if text.isidentifier():
        return DimName(text)
    raise ValueError(f"not a dimension: {text!r}")


def fresh_name(base: str, avoid: Iterable[str]) -> str:
    """A name not in `avoid`, derived from `base` by bumping a numeric suffix.

    The suffix chosen is one past the largest suffix already used with the
    same stem, so repeated freshening is deterministic.
    """
    avoid = set(avoid)
    if base not in avoid:
        return base
    stem = base.rstrip("0123456789") or base
    top = 0
    for name in avoid:
        if name.startswith(stem):
            rest = name[len(stem):]
            if rest == "":
                continue
            if rest.isdigit():
                top = max(top, int(rest))
    return f"{stem}{top + 1}"


# ---------------------------------------------------------------------------
# Contexts and substitutions

DimCtx = frozenset  # of str; invariant: a finite set of distinct names


def dim_ctx(names: Iterable[str]) -> DimCtx:
    return frozenset(names)


@dataclass(frozen=True)
class DimSubst:
    """A total dimension substitution from `source` to `target`.

    Every name of the source context is mapped to a constant or to a name of
    the target context.
    """

    source: DimCtx
    target: DimCtx
    map: Mapping[str, Dim]

    def __post_init__(self):
        object.__setattr__(self, "map", dict(self.map))
        missing = self.source - self.map.keys()
        if missing:
            raise ScopeError(f"substitution not total, missing {sorted(missing)}")
        extra = self.map.keys() - self.source
        if extra:
            raise ScopeError(f"substitution maps names outside its source: {sorted(extra)}")
        for x, r in self.map.items():
            if isinstance(r, DimName) and r.name not in self.target:
                raise ScopeError(f"{x} maps to {r} outside target context")

    def __str__(self) -> str:
        inner = ", ".join(f"{x}->{self.map[x]}" for x in sorted(self.source))
        return "{" + inner + "}"


def identity_subst(ctx: DimCtx) -> DimSubst:
    return DimSubst(ctx, ctx, {x: DimName(x) for x in ctx})


def apply_dim(psi: DimSubst, r: Dim) -> Dim:
    """Apply a total substitution to a dimension: constants are fixed."""
    if isinstance(r, DimConst):
        return r
    if isinstance(r, DimName):
        if r.name not in psi.source:
            raise ScopeError(f"dimension name {r.name} not in source context")
        return psi.map[r.name]
    raise TypeError(f"not a dimension: {r!r}")


def compose_subst(psi1: DimSubst, psi2: DimSubst) -> DimSubst:
    """First apply psi1, then psi2; requires psi2.source = psi1.target."""
    if psi2.source != psi1.target:
        raise ScopeError(
            f"cannot compose: target {sorted(psi1.target)} != source {sorted(psi2.source)}"
        )
    return DimSubst(
        psi1.source, psi2.target, {x: apply_dim(psi2, psi1.map[x]) for x in psi1.source}
    )


# ---------------------------------------------------------------------------
# Equations


@dataclass(frozen=True)
class Equation:
    """A dimension equation r = r'.

    Stored oriented (validity inspects the written orientation), but
    satisfaction treats the two sides symmetrically.
    """

    lhs: Dim
    rhs: Dim

    def __str__(self) -> str:
        return f"{self.lhs}={self.rhs}"

    def names(self) -> frozenset:
        out = set()
        for d in (self.lhs, self.rhs):
            if isinstance(d, DimName):
                out.add(d.name)
        return frozenset(out)


EquationList = tuple  # of Equation, insertion-ordered


def eqs(*pairs) -> EquationList:
    return tuple(Equation(l, r) for l, r in pairs)


def print_equations(equations: Iterable[Equation]) -> str:
    return ", ".join(str(e) for e in equations)


def satisfies(psi: DimSubst, xi: Iterable[Equation]) -> bool:
    """Whether psi equates both sides of every equation in xi."""
    for eq in xi:
        for d in (eq.lhs, eq.rhs):
            if isinstance(d, DimName) and d.name not in psi.source:
                raise ScopeError(f"equation {eq} not scoped in {sorted(psi.source)}")
        if apply_dim(psi, eq.lhs) != apply_dim(psi, eq.rhs):
            return False
    return True


def valid(equations: Iterable[Equation]) -> bool:
    """Whether an equation list is a valid composition shape.

    Either some equation is reflexive, or two equations share a left side
    while their right sides are the opposite endpoints.
    """
    equations = tuple(equations)
    for eq in equations:
        if eq.lhs == eq.rhs:
            return True
    for ei in equations:
        for ej in equations:
            if ei.lhs == ej.lhs and ei.rhs == DIM0 and ej.rhs == DIM1:
                return True
    return False
