"""Seeded random term generation and deterministic structural shrinking.

Generated terms are closed with respect to term variables and well-scoped in
a declared dimension context.  Subterms are mostly type-plausible by
construction (weighted templates per constructor), but typability is not
guaranteed; the metatheorems exercised over this generator hold for all
terms.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .cube import DIM0, DIM1, Dim, DimName, DimSubst, Equation, fresh_name
from . import syntax as S
from .syntax import Face, Term, Tube, fv


@dataclass(frozen=True)
class GenConfig:
    max_depth: int = 4
    dim_pool: int = 3  # size of the ambient dimension context
    max_tubes: int = 2
    seed: int = 0
    weights: dict = field(default_factory=dict)  # group name -> relative weight

    def pool(self) -> tuple[str, ...]:
        return tuple(f"x{i}" for i in range(self.dim_pool))


_LEAF_TYPES = (S.BOOL, S.NAT, S.WBOOL, S.CIRCLE, S.VOID, S.UKan(0), S.UPre(0))
_LEAVES = (S.TRUE, S.FALSE, S.ZERO, S.STAR, S.Base(), S.Suc(S.ZERO))

_DEFAULT_WEIGHTS = {
    "leaf": 4, "type": 2, "intro": 3, "elim": 3, "kan": 4, "vstuff": 2, "boxcap": 2,
}
_GROUPS = tuple(_DEFAULT_WEIGHTS)


class TermGen:
    """Deterministic term stream: the same seed yields the same terms."""

    def __init__(self, config: GenConfig | None = None):
        self.config = config or GenConfig()
        self.rng = random.Random(self.config.seed)
        self.psi = self.config.pool()
        w = dict(_DEFAULT_WEIGHTS)
        w.update(self.config.weights)
        self.weight_list = [w[g] for g in _GROUPS]

    # -- dimensions -----------------------------------------------------------

    def dim(self, psi=None) -> Dim:
        psi = self.psi if psi is None else psi
        roll = self.rng.random()
        if roll < 0.25:
            return DIM0
        if roll < 0.5:
            return DIM1
        return DimName(self.rng.choice(psi))

    def equation(self, psi=None) -> Equation:
        return Equation(self.dim(psi), self.dim(psi))

    def subst(self, source=None) -> DimSubst:
        """A random total substitution out of the generator's context."""
        source = tuple(self.psi) if source is None else tuple(source)
        targets = tuple(f"y{i}" for i in range(max(1, len(source))))
        mapping = {}
        for x in source:
            roll = self.rng.random()
            if roll < 0.3:
                mapping[x] = DIM0
            elif roll < 0.6:
                mapping[x] = DIM1
            else:
                mapping[x] = DimName(self.rng.choice(targets))
        return DimSubst(frozenset(source), frozenset(targets), mapping)

    # -- terms ------------------------------------------------------------------

    def term(self, depth: int | None = None) -> Term:
        d = self.config.max_depth if depth is None else depth
        return self._term(d, (), self.psi)

    def terms(self, n: int):
        for _ in range(n):
            yield self.term()

    def _bound_dim(self, psi) -> str:
        return f"z{self.rng.randrange(3)}"

    def _term(self, depth: int, env: tuple, psi: tuple) -> Term:
        r = self.rng
        group = "leaf" if depth <= 0 else r.choices(_GROUPS, self.weight_list)[0]
        d = depth - 1

        def leaf():
            if env and r.random() < 0.5:
                return S.Var(r.choice(env))
            return r.choice(_LEAVES + _LEAF_TYPES)

        def lam():
            a = fresh_name("a", set(env))
            return S.Lam(a, self._term(d, env + (a,), psi))

        def dlam():
            z = self._bound_dim(psi)
            return S.DLam(z, self._term(d, env, psi + (z,)))

        def natrec():
            return S.NatRec(
                self._term(d, env, psi),
                self._term(d, env, psi),
                "n",
                "acc",
                self._term(d, env + ("n", "acc"), psi),
            )

        def ifb():
            return S.If(
                "b",
                self._type(d, env + ("b",), psi),
                self._term(d, env, psi),
                self._term(d, env, psi),
                self._term(d, env, psi),
            )

        def circelim():
            z = self._bound_dim(psi)
            return S.CircElim(
                "c",
                self._type(d, env + ("c",), psi),
                self._term(d, env, psi),
                self._term(d, env, psi),
                z,
                self._term(d, env, psi + (z,)),
            )

        def coe_like(ctor):
            z = self._bound_dim(psi)
            return ctor(
                z,
                self._type(d, env, psi + (z,)),
                self.dim(psi),
                self.dim(psi),
                self._term(d, env, psi),
            )

        def com_like(ctor):
            z = self._bound_dim(psi)
            return ctor(
                z,
                self._type(d, env, psi + (z,)),
                self.dim(psi),
                self.dim(psi),
                self._term(d, env, psi),
                self._tubes(d, env, psi),
            )

        if group == "leaf":
            return leaf()
        if group == "type":
            return self._type(d, env, psi)
        if group == "intro":
            return r.choice(
                [
                    lam,
                    lambda: S.Pair(self._term(d, env, psi), self._term(d, env, psi)),
                    dlam,
                    lambda: S.Suc(self._term(d, env, psi)),
                    lambda: S.Loop(self.dim(psi)),
                    lambda: S.Vin(
                        self.dim(psi), self._term(d, env, psi), self._term(d, env, psi)
                    ),
                ]
            )()
        if group == "elim":
            return r.choice(
                [
                    lambda: S.App(self._term(d, env, psi), self._term(d, env, psi)),
                    lambda: S.Fst(self._term(d, env, psi)),
                    lambda: S.Snd(self._term(d, env, psi)),
                    lambda: S.DApp(self._term(d, env, psi), self.dim(psi)),
                    natrec,
                    ifb,
                    circelim,
                    lambda: S.Vproj(
                        self.dim(psi), self._term(d, env, psi), self._term(d, env, psi)
                    ),
                ]
            )()
        if group == "kan":
            return r.choice(
                [
                    lambda: S.Hcom(
                        self._type(d, env, psi), self.dim(psi), self.dim(psi),
                        self._term(d, env, psi), self._tubes(d, env, psi),
                    ),
                    lambda: coe_like(S.Coe),
                    lambda: com_like(S.Com),
                    lambda: S.Fcom(
                        self.dim(psi), self.dim(psi),
                        self._term(d, env, psi), self._tubes(d, env, psi),
                    ),
                    lambda: S.Ghcom(
                        self._type(d, env, psi), self.dim(psi), self.dim(psi),
                        self._term(d, env, psi), self._tubes(d, env, psi),
                    ),
                    lambda: com_like(S.Gcom),
                ]
            )()
        if group == "vstuff":
            return r.choice(
                [
                    lambda: S.V(
                        self.dim(psi), self._type(d, env, psi),
                        self._type(d, env, psi), self._term(d, env, psi),
                    ),
                    lambda: S.Vin(
                        self.dim(psi), self._term(d, env, psi), self._term(d, env, psi)
                    ),
                    lambda: S.Vproj(
                        self.dim(psi), self._term(d, env, psi), self._term(d, env, psi)
                    ),
                ]
            )()
        return r.choice(
            [
                lambda: S.Box(
                    self.dim(psi), self.dim(psi),
                    self._term(d, env, psi), self._faces(d, env, psi),
                ),
                lambda: S.Cap(
                    self.dim(psi), self.dim(psi),
                    self._term(d, env, psi), self._type_tubes(d, env, psi),
                ),
            ]
        )()

    def _type(self, depth: int, env: tuple, psi: tuple) -> Term:
        r = self.rng
        if depth <= 0 or r.random() < 0.5:
            return r.choice(_LEAF_TYPES)
        d = depth - 1

        def pi_like(ctor):
            a = fresh_name("a", set(env))
            return ctor(a, self._type(d, env, psi), self._type(d, env + (a,), psi))

        def path():
            z = self._bound_dim(psi)
            return S.Path(
                z,
                self._type(d, env, psi + (z,)),
                self._term(d, env, psi),
                self._term(d, env, psi),
            )

        return r.choice(
            [
                lambda: pi_like(S.Pi),
                lambda: pi_like(S.Sg),
                path,
                lambda: S.Eq(
                    self._type(d, env, psi),
                    self._term(d, env, psi),
                    self._term(d, env, psi),
                ),
                lambda: S.V(
                    self.dim(psi), self._type(d, env, psi),
                    self._type(d, env, psi), self._term(d, env, psi),
                ),
                lambda: S.Fcom(
                    self.dim(psi), self.dim(psi),
                    self._type(d, env, psi), self._type_tubes(d, env, psi),
                ),
                lambda: r.choice(_LEAF_TYPES),
            ]
        )()

    def _tubes(self, depth: int, env: tuple, psi: tuple) -> tuple:
        out = []
        for _ in range(self.rng.randrange(self.config.max_tubes + 1)):
            y = self._bound_dim(psi)
            out.append(Tube(self.equation(psi), y, self._term(depth, env, psi + (y,))))
        return tuple(out)

    def _type_tubes(self, depth: int, env: tuple, psi: tuple) -> tuple:
        out = []
        for _ in range(self.rng.randrange(self.config.max_tubes + 1)):
            y = self._bound_dim(psi)
            out.append(Tube(self.equation(psi), y, self._type(depth, env, psi + (y,))))
        return tuple(out)

    def _faces(self, depth: int, env: tuple, psi: tuple) -> tuple:
        return tuple(
            Face(self.equation(psi), self._term(depth, env, psi))
            for _ in range(self.rng.randrange(self.config.max_tubes + 1))
        )


def subterms(m: Term):
    """Immediate subterms, in field order."""
    from .syntax import SIG, _FIELDS

    sig = SIG[type(m)]
    for (kind, _), name in zip(sig, _FIELDS[type(m)]):
        val = getattr(m, name)
        if kind == "term":
            yield val
        elif kind == "sys":
            for t in val:
                yield t.body
        elif kind == "faces":
            for f in val:
                yield f.body


def shrink(m: Term, fails) -> Term:
    """Deterministic children-first structural shrinking.

    `fails(t)` reports whether the property still fails at t; the result is a
    minimal failing term reachable by descending into term-closed subterms.
    """
    changed = True
    while changed:
        changed = False
        for sub in subterms(m):
            if fv(sub):
                continue
            try:
                still = fails(sub)
            except Exception:
                continue
            if still:
                m = sub
                changed = True
                break
    return m
