"""The metatheorem property suites, run over the seeded generator.

Each suite generates n cases and returns the failures it finds; the first
failure is shrunk structurally.  All suites are deterministic in the seed.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cube import compose_subst
from . import syntax as S
from .gen import GenConfig, TermGen, shrink
from .opsem import StepsTo, Stuck, Value, eval_term, is_val, rule_fires, step
from .parser import parse, pretty
from .syntax import alpha_eq, apply_subst, fd


@dataclass
class Failure:
    case: int
    term: object
    detail: str

    def __str__(self) -> str:
        return f"case {self.case}: {pretty(self.term)}\n  {self.detail}"


SUITES = (
    "dim-preservation",
    "stability",
    "subst-functoriality",
    "exclusivity",
    "roundtrip",
    "coherence-bool",
)


def _run(n: int, seed: int, check) -> list[Failure]:
    """Drive `check(gen, term) -> detail | None` over n generated terms."""
    gen = TermGen(GenConfig(seed=seed))
    failures: list[Failure] = []
    for case, term in enumerate(gen.terms(n)):
        detail = check(gen, term)
        if detail is not None:
            small = shrink(term, lambda t: check(gen, t) is not None)
            failures.append(Failure(case, small, detail))
            break
    return failures


def suite_dim_preservation(n: int, seed: int) -> list[Failure]:
    """A step never introduces new free dimension names."""

    def check(gen, m):
        out = step(m)
        if isinstance(out, StepsTo) and not fd(out.term) <= fd(m):
            extra = sorted(fd(out.term) - fd(m))
            return f"step introduced {extra}: {pretty(out.term)}"
        return None

    return _run(n, seed, check)


def suite_stability(n: int, seed: int) -> list[Failure]:
    """Stable steps and values commute with total dimension substitution."""

    def check(gen, m):
        psi = gen.subst(source=fd(m) | frozenset(gen.psi))
        out = step(m)
        if isinstance(out, StepsTo) and out.stable:
            m2 = apply_subst(m, psi)
            out2 = step(m2)
            if not isinstance(out2, StepsTo):
                return f"under {psi} the term no longer steps: {out2}"
            want = apply_subst(out.term, psi)
            if not alpha_eq(out2.term, want):
                return (
                    f"under {psi}: stepped to {pretty(out2.term)}, "
                    f"expected {pretty(want)}"
                )
        elif isinstance(out, Value) and out.stable:
            if is_val(apply_subst(m, psi)) is None:
                return f"under {psi} the value is no longer canonical"
        return None

    return _run(n, seed, check)


def suite_subst_functoriality(n: int, seed: int) -> list[Failure]:
    """Substitution composes: acting twice equals acting by the composite."""

    def check(gen, m):
        p1 = gen.subst(source=fd(m) | frozenset(gen.psi))
        p2 = gen.subst(source=p1.target)
        lhs = apply_subst(apply_subst(m, p1), p2)
        rhs = apply_subst(m, compose_subst(p1, p2))
        if not alpha_eq(lhs, rhs):
            return f"{pretty(lhs)} != {pretty(rhs)} via {p1};{p2}"
        return None

    return _run(n, seed, check)


def suite_exclusivity(n: int, seed: int) -> list[Failure]:
    """Exactly one of value / steps-to / stuck holds, by a unique rule."""

    def check(gen, m):
        fires = rule_fires(m)
        if len(fires) > 1:
            return "multiple rules fire: " + ", ".join(f.rule for f in fires)
        out = step(m)
        v = is_val(m)
        if isinstance(out, Value) and v is None:
            return "step says value but is_val disagrees"
        if isinstance(out, StepsTo) and v is not None:
            return f"value by {v.rule} also steps by {out.rule}"
        if isinstance(out, Stuck) and v is not None:
            return "stuck term reported as a value"
        return None

    return _run(n, seed, check)


def suite_roundtrip(n: int, seed: int) -> list[Failure]:
    """Printing then parsing is the identity up to alpha."""

    def check(gen, m):
        text = pretty(m)
        try:
            back = parse(text)
        except Exception as e:
            return f"failed to re-parse {text!r}: {e}"
        if not alpha_eq(back, m):
            return f"round trip changed the term: {text!r}"
        return None

    return _run(n, seed, check)


def suite_coherence_bool(n: int, seed: int, fuel: int | None = None) -> list[Failure]:
    """Evaluation of boolean programs commutes with substitution.

    For each corpus boolean program: evaluate, substitute, re-evaluate; the
    result must be the boolean given by substituting first with the
    composite.  n counts substitution pairs per program.
    """
    from .corpus import load_corpus
    from .opsem import DEFAULT_FUEL

    fuel = fuel or DEFAULT_FUEL
    gen = TermGen(GenConfig(seed=seed))
    failures: list[Failure] = []
    for entry in load_corpus():
        if "bool" not in entry.tags:
            continue
        m = entry.term()
        source = fd(m) | frozenset(gen.psi)
        for case in range(n):
            p1 = gen.subst(source=source)
            p2 = gen.subst(source=p1.target)
            v1, _ = eval_term(apply_subst(m, p1), fuel)
            twice, _ = eval_term(apply_subst(v1, p2), fuel)
            once, _ = eval_term(apply_subst(m, compose_subst(p1, p2)), fuel)
            if not alpha_eq(twice, once):
                failures.append(
                    Failure(
                        case,
                        m,
                        f"{entry.name}: {pretty(twice)} != {pretty(once)} "
                        f"via {p1};{p2}",
                    )
                )
                return failures
    return failures


def run_suite(name: str, n: int, seed: int) -> list[Failure]:
    if name == "dim-preservation":
        return suite_dim_preservation(n, seed)
    if name == "stability":
        return suite_stability(n, seed)
    if name == "subst-functoriality":
        return suite_subst_functoriality(n, seed)
    if name == "exclusivity":
        return suite_exclusivity(n, seed)
    if name == "roundtrip":
        return suite_roundtrip(n, seed)
    if name == "coherence-bool":
        return suite_coherence_bool(n, seed)
    raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
