"""Deterministic weak-head evaluation with cubical-stability tagging.

``step`` implements one transition of the machine; ``is_val`` recognizes
canonical forms.  Each rule carries a stable identifier (``paragraph/name``,
catalogued in ``RULES``) and a stability flag: a stable step or value is one
that commutes with every total dimension substitution.  Congruence steps are
stable exactly when the rule is stable and the premise step was stable.

Evaluation is defined on terms with no free term variables; free dimension
names are permitted and significant.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .cube import DIM0, DIM1, Dim, DimConst, DimName, Equation, dim_flip, fresh_name
from . import syntax as S
from .syntax import Term, Tube, Face, dsubst, tsubst, fd, fv
from .parser import pretty


class EvalError(Exception):
    pass


class OpenTermError(EvalError):
    """The machine was given a term with free term variables."""


class FuelExhausted(EvalError):
    def __init__(self, term: Term, fuel: int):
        super().__init__(f"no value after {fuel} steps")
        self.term = term
        self.fuel = fuel


class StuckError(EvalError):
    def __init__(self, term: Term, reason: str):
        super().__init__(f"stuck at: {reason}")
        self.term = term
        self.reason = reason


@dataclass(frozen=True)
class Value:
    stable: bool
    rule: str


@dataclass(frozen=True)
class StepsTo:
    term: Term
    stable: bool
    rule: str
    via: str = ""  # innermost rule driving a congruence chain

    def __post_init__(self):
        if not self.via:
            object.__setattr__(self, "via", self.rule)


@dataclass(frozen=True)
class Stuck:
    reason: str


StepOutcome = Value | StepsTo | Stuck

DEFAULT_FUEL = 10**6


# ---------------------------------------------------------------------------
# Rule catalog

RULES: dict[str, dict] = {}


def _rule(rid: str, kind: str, stable: bool, desc: str) -> str:
    RULES[rid] = {"kind": kind, "stable": stable, "desc": desc}
    return rid


# Types
_rule("types/pi-val", "val", True, "pi (a : A) B is a value")
_rule("types/sg-val", "val", True, "sg (a : A) B is a value")
_rule("types/path-val", "val", True, "path (x. A) M N is a value")
_rule("types/eq-val", "val", True, "eq A M N is a value")
_rule("types/void-val", "val", True, "void is a value")
_rule("types/nat-val", "val", True, "nat is a value")
_rule("types/bool-val", "val", True, "bool is a value")
_rule("types/wbool-val", "val", True, "wbool is a value")
_rule("types/circle-val", "val", True, "S1 is a value")
_rule("types/upre-val", "val", True, "U pre j is a value")
_rule("types/ukan-val", "val", True, "U kan j is a value")
_rule("types/v-val", "val", False, "V x A B E is a value when x is a name")
_rule("types/v-zero", "step", True, "V 0 A B E steps to A")
_rule("types/v-one", "step", True, "V 1 A B E steps to B")
# Kan operations
_rule("kan/hcom-cong", "step", True, "hcom steps its type argument")
_rule("kan/coe-cong", "step", True, "coe steps its type argument under the binder")
_rule("kan/com-unfold", "step", True, "com unfolds to hcom of coerced cap and tubes")
_rule("kan/fcom-cap", "step", True, "fcom with equal endpoints steps to its cap")
_rule("kan/fcom-tube", "step", False, "fcom steps into the least true tube")
_rule("kan/fcom-val", "val", False, "fcom with apart endpoints and tubes is a value")
_rule("kan/ghcom-empty", "step", True, "ghcom with no tubes steps to its cap")
_rule("kan/ghcom-split", "step", True, "ghcom splits its first tube through both endpoints")
_rule("kan/gcom-unfold", "step", True, "gcom unfolds to ghcom of coerced cap and tubes")
# Dependent function types
_rule("fun/app-cong", "step", True, "application steps its function position")
_rule("fun/beta", "step", True, "beta reduction")
_rule("fun/lam-val", "val", True, "lam a. M is a value")
_rule("fun/hcom", "step", True, "hcom at a pi type abstracts pointwise hcom")
_rule("fun/coe", "step", True, "coe at a pi type precomposes with reverse coercion")
# Dependent pair types
_rule("pair/fst-cong", "step", True, "fst steps its argument")
_rule("pair/snd-cong", "step", True, "snd steps its argument")
_rule("pair/pair-val", "val", True, "pair M N is a value")
_rule("pair/fst-beta", "step", True, "fst of a pair")
_rule("pair/snd-beta", "step", True, "snd of a pair")
_rule("pair/hcom", "step", True, "hcom at a sigma type composes components")
_rule("pair/coe", "step", True, "coe at a sigma type coerces components")
# Path types
_rule("path/dapp-cong", "step", True, "dimension application steps its function")
_rule("path/beta", "step", True, "dimension beta reduction")
_rule("path/dlam-val", "val", True, "dlam x. M is a value")
_rule("path/hcom", "step", True, "hcom at a path type adds endpoint tubes")
_rule("path/coe", "step", True, "coe at a path type becomes com with endpoint tubes")
# Equality pretypes
_rule("eq/star-val", "val", True, "* is a value")
_rule("eq/hcom", "step", True, "hcom at an equality pretype steps to *")
# Natural numbers
_rule("nat/zero-val", "val", True, "zero is a value")
_rule("nat/suc-val", "val", True, "suc M is a value")
_rule("nat/natrec-cong", "step", True, "natrec steps its scrutinee")
_rule("nat/natrec-zero", "step", True, "natrec at zero")
_rule("nat/natrec-suc", "step", True, "natrec at a successor")
_rule("nat/hcom", "step", True, "hcom at nat steps to its cap")
_rule("nat/coe", "step", True, "coe at nat steps to its argument")
# Booleans
_rule("bool/true-val", "val", True, "true is a value")
_rule("bool/false-val", "val", True, "false is a value")
_rule("bool/if-cong", "step", True, "if steps its scrutinee")
_rule("bool/if-true", "step", True, "if at true")
_rule("bool/if-false", "step", True, "if at false")
_rule("bool/hcom", "step", True, "hcom at bool steps to its cap")
_rule("bool/coe", "step", True, "coe at bool steps to its argument")
# Weak booleans
_rule("wbool/hcom", "step", True, "hcom at wbool steps to fcom")
_rule("wbool/if-fcom", "step", False, "if eliminates an fcom value through com")
_rule("wbool/coe", "step", True, "coe at wbool steps to its argument")
# Circle
_rule("circle/hcom", "step", True, "hcom at S1 steps to fcom")
_rule("circle/loop-eps", "step", True, "loop at an endpoint steps to base")
_rule("circle/base-val", "val", True, "base is a value")
_rule("circle/loop-val", "val", False, "loop x is a value when x is a name")
_rule("circle/elim-cong", "step", True, "S1elim steps its scrutinee")
_rule("circle/elim-base", "step", True, "S1elim at base")
_rule("circle/elim-loop", "step", False, "S1elim at loop instantiates the loop case")
_rule("circle/elim-fcom", "step", False, "S1elim eliminates an fcom value through com")
_rule("circle/coe", "step", True, "coe at S1 steps to its argument")
# Univalence
_rule("ua/vin-val", "val", False, "Vin x M N is a value when x is a name")
_rule("ua/vin-zero", "step", True, "Vin 0 M N steps to M")
_rule("ua/vin-one", "step", True, "Vin 1 M N steps to N")
_rule("ua/vproj-zero", "step", True, "Vproj 0 M F applies the equivalence")
_rule("ua/vproj-one", "step", True, "Vproj 1 M F steps to M")
_rule("ua/vproj-cong", "step", False, "Vproj at a name steps its principal argument")
_rule("ua/vproj-vin", "step", False, "Vproj of Vin at the same name projects")
_rule("ua/hcom", "step", False, "hcom at a V type composes both faces")
_rule("ua/coe-zero", "step", True, "coe from 0 at a V type in its own direction")
_rule("ua/coe-one", "step", True, "coe from 1 at a V type in its own direction")
_rule("ua/coe-diag", "step", False, "coe from a name at a V type in its own direction")
_rule("ua/coe-other", "step", False, "coe along an unrelated direction of a V type")
# Universes
_rule("univ/hcom-kan", "step", True, "hcom at a Kan universe steps to fcom")
_rule("univ/coe", "step", True, "coe at a universe steps to its argument")
_rule("univ/box-cap", "step", True, "box with equal endpoints steps to its cap")
_rule("univ/box-tube", "step", False, "box steps to the least true face")
_rule("univ/box-val", "val", False, "box with apart endpoints and faces is a value")
_rule("univ/cap-cap", "step", True, "cap with equal endpoints steps to its argument")
_rule("univ/cap-tube", "step", False, "cap coerces along the least true tube")
_rule("univ/cap-cong", "step", False, "cap steps its principal argument")
_rule("univ/cap-box", "step", False, "cap of a matching box recovers its cap")
_rule("univ/hcom-fcom", "step", False, "hcom at an fcom type builds a box")
_rule("univ/coe-fcom", "step", False, "coe at an fcom type builds a box")


# ---------------------------------------------------------------------------
# Small helpers


def _name(d: Dim) -> str | None:
    return d.name if isinstance(d, DimName) else None


def _dnames(*dims: Dim) -> set:
    return {d.name for d in dims if isinstance(d, DimName)}


def _dim_subst(d: Dim, r: Dim, x: str) -> Dim:
    return r if isinstance(d, DimName) and d.name == x else d


def _apart(eq: Equation) -> bool:
    return eq.lhs != eq.rhs


def _fcom_value(t: Term) -> bool:
    return (
        isinstance(t, S.Fcom)
        and t.src != t.dst
        and all(_apart(tb.eq) for tb in t.sys)
    )


def _box_value(t: Term) -> bool:
    return (
        isinstance(t, S.Box)
        and t.src != t.dst
        and all(_apart(f.eq) for f in t.faces)
    )


def _least_true(entries) -> int | None:
    for i, e in enumerate(entries):
        if e.eq.lhs == e.eq.rhs:
            return i
    return None


def _open_tube(t: Tube, avoid: set) -> Tube:
    if t.y in avoid:
        y2 = fresh_name(t.y, avoid | fd(t.body))
        return Tube(t.eq, y2, dsubst(t.body, DimName(y2), t.y))
    return t


def _map_tubes(sys, f, avoid: set):
    """Rebuild tubes with transformed bodies, keeping binders out of `avoid`."""
    out = []
    for t in sys:
        t = _open_tube(t, avoid)
        out.append(Tube(t.eq, t.y, f(t.body)))
    return tuple(out)


def _open_dbinder(x: str, body: Term, avoid: set):
    if x in avoid:
        x2 = fresh_name(x, avoid | fd(body))
        return x2, dsubst(body, DimName(x2), x)
    return x, body


# ---------------------------------------------------------------------------
# The stepper


def is_val(m: Term) -> Value | None:
    """Value recognition; None when the term is not a canonical form."""
    if fv(m):
        raise OpenTermError(f"free term variables {sorted(fv(m))} in {pretty(m)}")
    out = _head(m)
    return out if isinstance(out, Value) else None


def step(m: Term) -> StepOutcome:
    """One transition of the machine, or Value/Stuck."""
    if fv(m):
        raise OpenTermError(f"free term variables {sorted(fv(m))} in {pretty(m)}")
    return _head(m)


def rule_fires(m: Term) -> list:
    """Every rule firing at the root of m; used by the determinacy suite."""
    return _fires(m)[0]


def _head(m: Term) -> StepOutcome:
    fires, reason = _fires(m)
    if fires:
        return fires[0]
    return Stuck(reason if reason is not None else pretty(m))


def _cong(sub: Term, rebuild, rid: str, fires: list, stable_rule: bool = True):
    """Apply a congruence rule: step `sub` and rebuild around the result.

    Returns a stuck reason when the premise is stuck, else None.
    """
    out = _head(sub)
    if isinstance(out, StepsTo):
        fires.append(StepsTo(rebuild(out.term), stable_rule and out.stable, rid, out.via))
        return None
    if isinstance(out, Stuck):
        return out.reason
    return None


def _fires(m: Term):
    """All (rule, outcome) matches at the root; also a stuck reason, if any."""
    fires: list = []
    reason = None
    match m:
        # -- canonical type formers ---------------------------------------
        case S.Pi():
            fires.append(Value(True, "types/pi-val"))
        case S.Sg():
            fires.append(Value(True, "types/sg-val"))
        case S.Path():
            fires.append(Value(True, "types/path-val"))
        case S.Eq():
            fires.append(Value(True, "types/eq-val"))
        case S.Void():
            fires.append(Value(True, "types/void-val"))
        case S.Nat():
            fires.append(Value(True, "types/nat-val"))
        case S.Bool():
            fires.append(Value(True, "types/bool-val"))
        case S.WBool():
            fires.append(Value(True, "types/wbool-val"))
        case S.Circle():
            fires.append(Value(True, "types/circle-val"))
        case S.UPre():
            fires.append(Value(True, "types/upre-val"))
        case S.UKan():
            fires.append(Value(True, "types/ukan-val"))
        case S.V(r, a, b, _):
            if isinstance(r, DimName):
                fires.append(Value(False, "types/v-val"))
            elif r == DIM0:
                fires.append(StepsTo(a, True, "types/v-zero"))
            else:
                fires.append(StepsTo(b, True, "types/v-one"))

        # -- functions -----------------------------------------------------
        case S.Lam():
            fires.append(Value(True, "fun/lam-val"))
        case S.App(fn, arg):
            if isinstance(fn, S.Lam):
                fires.append(StepsTo(tsubst(fn.body, arg, fn.var), True, "fun/beta"))
            else:
                reason = _cong(fn, lambda f: S.App(f, arg), "fun/app-cong", fires)

        # -- pairs ----------------------------------------------------------
        case S.Pair():
            fires.append(Value(True, "pair/pair-val"))
        case S.Fst(p):
            if isinstance(p, S.Pair):
                fires.append(StepsTo(p.fst, True, "pair/fst-beta"))
            else:
                reason = _cong(p, S.Fst, "pair/fst-cong", fires)
        case S.Snd(p):
            if isinstance(p, S.Pair):
                fires.append(StepsTo(p.snd, True, "pair/snd-beta"))
            else:
                reason = _cong(p, S.Snd, "pair/snd-cong", fires)

        # -- paths ----------------------------------------------------------
        case S.DLam():
            fires.append(Value(True, "path/dlam-val"))
        case S.DApp(fn, r):
            if isinstance(fn, S.DLam):
                fires.append(StepsTo(dsubst(fn.body, r, fn.dvar), True, "path/beta"))
            else:
                reason = _cong(fn, lambda f: S.DApp(f, r), "path/dapp-cong", fires)

        # -- equality -------------------------------------------------------
        case S.Star():
            fires.append(Value(True, "eq/star-val"))

        # -- naturals ---------------------------------------------------------
        case S.Zero():
            fires.append(Value(True, "nat/zero-val"))
        case S.Suc():
            fires.append(Value(True, "nat/suc-val"))
        case S.NatRec(scrut, z, n, a, s):
            if isinstance(scrut, S.Zero):
                fires.append(StepsTo(z, True, "nat/natrec-zero"))
            elif isinstance(scrut, S.Suc):
                prev = S.NatRec(scrut.n, z, n, a, s)
                body = tsubst(tsubst(s, scrut.n, n), prev, a)
                fires.append(StepsTo(body, True, "nat/natrec-suc"))
            else:
                reason = _cong(
                    scrut, lambda v: S.NatRec(v, z, n, a, s), "nat/natrec-cong", fires
                )

        # -- booleans ---------------------------------------------------------
        case S.True_():
            fires.append(Value(True, "bool/true-val"))
        case S.False_():
            fires.append(Value(True, "bool/false-val"))
        case S.If(b, motive, scrut, tc, fc):
            if isinstance(scrut, S.True_):
                fires.append(StepsTo(tc, True, "bool/if-true"))
            elif isinstance(scrut, S.False_):
                fires.append(StepsTo(fc, True, "bool/if-false"))
            elif _fcom_value(scrut):
                fires.append(StepsTo(_if_fcom(m), False, "wbool/if-fcom"))
            else:
                reason = _cong(
                    scrut, lambda v: S.If(b, motive, v, tc, fc), "bool/if-cong", fires
                )

        # -- circle -----------------------------------------------------------
        case S.Base():
            fires.append(Value(True, "circle/base-val"))
        case S.Loop(r):
            if isinstance(r, DimConst):
                fires.append(StepsTo(S.Base(), True, "circle/loop-eps"))
            else:
                fires.append(Value(False, "circle/loop-val"))
        case S.CircElim(c, motive, scrut, p, x, l):
            if isinstance(scrut, S.Base):
                fires.append(StepsTo(p, True, "circle/elim-base"))
            elif isinstance(scrut, S.Loop) and isinstance(scrut.r, DimName):
                fires.append(StepsTo(dsubst(l, scrut.r, x), False, "circle/elim-loop"))
            elif _fcom_value(scrut):
                fires.append(StepsTo(_circelim_fcom(m), False, "circle/elim-fcom"))
            else:
                reason = _cong(
                    scrut,
                    lambda v: S.CircElim(c, motive, v, p, x, l),
                    "circle/elim-cong",
                    fires,
                )

        # -- univalence intro/elim ---------------------------------------------
        case S.Vin(r, a, b):
            if isinstance(r, DimName):
                fires.append(Value(False, "ua/vin-val"))
            elif r == DIM0:
                fires.append(StepsTo(a, True, "ua/vin-zero"))
            else:
                fires.append(StepsTo(b, True, "ua/vin-one"))
        case S.Vproj(r, v, f):
            if r == DIM0:
                fires.append(StepsTo(S.App(f, v), True, "ua/vproj-zero"))
            elif r == DIM1:
                fires.append(StepsTo(v, True, "ua/vproj-one"))
            elif isinstance(v, S.Vin) and v.r == r:
                fires.append(StepsTo(v.n, False, "ua/vproj-vin"))
            else:
                reason = _cong(
                    v, lambda v2: S.Vproj(r, v2, f), "ua/vproj-cong", fires, stable_rule=False
                )

        # -- Kan operations -----------------------------------------------------
        case S.Hcom(ty, src, dst, cap, sys):
            out = _head(ty)
            if isinstance(out, StepsTo):
                fires.append(
                    StepsTo(
                        S.Hcom(out.term, src, dst, cap, sys),
                        out.stable,
                        "kan/hcom-cong",
                        out.via,
                    )
                )
            elif isinstance(out, Stuck):
                reason = out.reason
            else:
                hc = _hcom_at(m)
                if hc is None:
                    reason = f"no composition rule for type: {pretty(ty)}"
                else:
                    fires.append(hc)
        case S.Coe(x, ty, src, dst, cap):
            x, ty = _open_dbinder(x, ty, _dnames(src, dst) | fd(cap))
            out = _head(ty)
            if isinstance(out, StepsTo):
                fires.append(
                    StepsTo(
                        S.Coe(x, out.term, src, dst, cap),
                        out.stable,
                        "kan/coe-cong",
                        out.via,
                    )
                )
            elif isinstance(out, Stuck):
                reason = out.reason
            else:
                co = _coe_at(S.Coe(x, ty, src, dst, cap))
                if co is None:
                    reason = f"no coercion rule for type: {pretty(ty)}"
                else:
                    fires.append(co)
        case S.Com():
            fires.append(StepsTo(_com_unfold(m), True, "kan/com-unfold"))
        case S.Fcom(src, dst, cap, sys):
            if src == dst:
                fires.append(StepsTo(cap, True, "kan/fcom-cap"))
            else:
                j = _least_true(sys)
                if j is not None:
                    t = sys[j]
                    fires.append(StepsTo(dsubst(t.body, dst, t.y), False, "kan/fcom-tube"))
                else:
                    fires.append(Value(False, "kan/fcom-val"))
        case S.Ghcom(ty, src, dst, cap, sys):
            if not sys:
                fires.append(StepsTo(cap, True, "kan/ghcom-empty"))
            else:
                fires.append(StepsTo(_ghcom_split(m), True, "kan/ghcom-split"))
        case S.Gcom():
            fires.append(StepsTo(_gcom_unfold(m), True, "kan/gcom-unfold"))

        # -- boxes and caps ---------------------------------------------------
        case S.Box(src, dst, cap, faces):
            if src == dst:
                fires.append(StepsTo(cap, True, "univ/box-cap"))
            else:
                j = _least_true(faces)
                if j is not None:
                    fires.append(StepsTo(faces[j].body, False, "univ/box-tube"))
                else:
                    fires.append(Value(False, "univ/box-val"))
        case S.Cap(src, dst, box, sys):
            if src == dst:
                fires.append(StepsTo(box, True, "univ/cap-cap"))
            else:
                j = _least_true(sys)
                if j is not None:
                    t = sys[j]
                    fires.append(
                        StepsTo(S.Coe(t.y, t.body, dst, src, box), False, "univ/cap-tube")
                    )
                elif (
                    _box_value(box)
                    and box.src == src
                    and box.dst == dst
                    and len(box.faces) == len(sys)
                    and all(f.eq == t.eq for f, t in zip(box.faces, sys))
                ):
                    fires.append(StepsTo(box.cap, False, "univ/cap-box"))
                else:
                    reason = _cong(
                        box,
                        lambda v: S.Cap(src, dst, v, sys),
                        "univ/cap-cong",
                        fires,
                        stable_rule=False,
                    )
        case S.Var(name):
            reason = f"free variable {name}"
    return fires, reason


# ---------------------------------------------------------------------------
# hcom dispatch by (value) type


def _hcom_at(m: S.Hcom) -> StepOutcome | None:
    ty, src, dst, cap, sys = m.ty, m.src, m.dst, m.cap, m.sys
    match ty:
        case S.Pi(a, _, b):
            body = S.Hcom(
                b,
                src,
                dst,
                S.App(cap, S.Var(a)),
                tuple(Tube(t.eq, t.y, S.App(t.body, S.Var(a))) for t in sys),
            )
            return StepsTo(S.Lam(a, body), True, "fun/hcom")
        case S.Sg(a, dom, b):
            av = set(fd(m))
            z = fresh_name("z", av)
            fst_tubes = tuple(Tube(t.eq, t.y, S.Fst(t.body)) for t in sys)
            snd_tubes = tuple(Tube(t.eq, t.y, S.Snd(t.body)) for t in sys)
            filler = S.Hcom(dom, src, DimName(z), S.Fst(cap), fst_tubes)
            first = S.Hcom(dom, src, dst, S.Fst(cap), fst_tubes)
            second = S.Com(z, tsubst(b, filler, a), src, dst, S.Snd(cap), snd_tubes)
            return StepsTo(S.Pair(first, second), True, "pair/hcom")
        case S.Path(x, a, p0, p1):
            av = set(fd(m))
            x, a = _open_dbinder(x, a, av)
            u = fresh_name("_", av | {x})
            tubes = (
                Tube(Equation(DimName(x), DIM0), u, p0),
                Tube(Equation(DimName(x), DIM1), u, p1),
            ) + _map_tubes(sys, lambda n: S.DApp(n, DimName(x)), av | {x, u})
            body = S.Hcom(a, src, dst, S.DApp(cap, DimName(x)), tubes)
            return StepsTo(S.DLam(x, body), True, "path/hcom")
        case S.Eq():
            return StepsTo(S.STAR, True, "eq/hcom")
        case S.Nat():
            return StepsTo(cap, True, "nat/hcom")
        case S.Bool():
            return StepsTo(cap, True, "bool/hcom")
        case S.WBool():
            return StepsTo(S.Fcom(src, dst, cap, sys), True, "wbool/hcom")
        case S.Circle():
            return StepsTo(S.Fcom(src, dst, cap, sys), True, "circle/hcom")
        case S.UKan():
            return StepsTo(S.Fcom(src, dst, cap, sys), True, "univ/hcom-kan")
        case S.V(r, a, b, e) if isinstance(r, DimName):
            return StepsTo(_hcom_v(m), False, "ua/hcom")
        case S.Fcom() if _fcom_value(ty):
            return StepsTo(_hcom_fcom(m), False, "univ/hcom-fcom")
    return None


def _hcom_v(m: S.Hcom) -> Term:
    ty, src, dst, cap, sys = m.ty, m.src, m.dst, m.cap, m.sys
    x, a, b, e = ty.r.name, ty.a, ty.b, ty.equiv
    av = set(fd(m))
    y = fresh_name("y", av)
    filler = S.Hcom(a, src, DimName(y), cap, sys)
    proj = lambda n: S.Vproj(DimName(x), n, S.Fst(e))
    tubes = _map_tubes(sys, proj, av | {y}) + (
        Tube(Equation(DimName(x), DIM0), y, S.App(S.Fst(e), filler)),
        Tube(Equation(DimName(x), DIM1), y, S.Hcom(b, src, DimName(y), cap, sys)),
    )
    inner = S.Hcom(b, src, dst, proj(cap), tubes)
    return S.Vin(DimName(x), dsubst(filler, dst, y), inner)


def _hcom_fcom(m: S.Hcom) -> Term:
    """Composition in a formal composite type: the box-building rule."""
    ty, r, r2, cap, sys = m.ty, m.src, m.dst, m.cap, m.sys
    s, s2, a, tsys = ty.src, ty.dst, ty.cap, ty.sys
    av = set(fd(m))
    z = fresh_name("z", av)
    z2 = fresh_name("z'", av | {z})
    avz = av | {z, z2}

    def p_j(tb: Tube) -> Term:
        zj, bj = tb.y, tb.body
        return S.Hcom(
            bj,
            r,
            r2,
            S.Coe(zj, bj, s2, DimName(z), cap),
            _map_tubes(sys, lambda n: S.Coe(zj, bj, s2, DimName(z), n), avz),
        )

    def f_of(c: Term) -> Term:
        tubes = tuple(
            Tube(
                tb.eq,
                z2,
                S.Coe(tb.y, tb.body, DimName(z2), s, S.Coe(tb.y, tb.body, s2, DimName(z2), c)),
            )
            for tb in tsys
        )
        return S.Hcom(a, s2, DimName(z), S.Cap(s, s2, c, tsys), tubes)

    big_o = S.Hcom(
        a,
        r,
        r2,
        dsubst(f_of(cap), s, z),
        _map_tubes(sys, lambda n: dsubst(f_of(n), s, z), avz),
    )
    opened = [_open_tube(t, avz) for t in sys]
    q_tubes = (
        tuple(Tube(t.eq, z, f_of(dsubst(t.body, r2, t.y))) for t in opened)
        + tuple(
            Tube(tb.eq, z, S.Coe(tb.y, tb.body, DimName(z), s, p_j(tb))) for tb in tsys
        )
        + (Tube(Equation(r, r2), z, f_of(cap)),)
    )
    q = S.Hcom(a, s, s2, big_o, q_tubes)
    return S.Box(s, s2, q, tuple(Face(tb.eq, dsubst(p_j(tb), s2, z)) for tb in tsys))


# ---------------------------------------------------------------------------
# coe dispatch by (value) type


def _coe_at(m: S.Coe) -> StepOutcome | None:
    x, ty, src, dst, cap = m.dvar, m.ty, m.src, m.dst, m.cap
    match ty:
        case S.Pi(a, dom, b):
            arg_back = S.Coe(x, dom, dst, src, S.Var(a))
            fam = tsubst(b, S.Coe(x, dom, dst, DimName(x), S.Var(a)), a)
            body = S.Coe(x, fam, src, dst, S.App(cap, arg_back))
            return StepsTo(S.Lam(a, body), True, "fun/coe")
        case S.Sg(a, dom, b):
            first = S.Coe(x, dom, src, dst, S.Fst(cap))
            fam = tsubst(b, S.Coe(x, dom, src, DimName(x), S.Fst(cap)), a)
            second = S.Coe(x, fam, src, dst, S.Snd(cap))
            return StepsTo(S.Pair(first, second), True, "pair/coe")
        case S.Path(px, a, p0, p1):
            av = set(fd(m)) | {x}
            px, a = _open_dbinder(px, a, av)
            tubes = (
                Tube(Equation(DimName(px), DIM0), x, p0),
                Tube(Equation(DimName(px), DIM1), x, p1),
            )
            body = S.Com(x, a, src, dst, S.DApp(cap, DimName(px)), tubes)
            return StepsTo(S.DLam(px, body), True, "path/coe")
        case S.Nat():
            return StepsTo(cap, True, "nat/coe")
        case S.Bool():
            return StepsTo(cap, True, "bool/coe")
        case S.WBool():
            return StepsTo(cap, True, "wbool/coe")
        case S.Circle():
            return StepsTo(cap, True, "circle/coe")
        case S.UPre() | S.UKan():
            return StepsTo(cap, True, "univ/coe")
        case S.V(r, a, b, e) if isinstance(r, DimName) and r.name == x:
            if src == DIM0:
                inner = S.Coe(x, b, DIM0, dst, S.App(S.Fst(dsubst(e, DIM0, x)), cap))
                return StepsTo(S.Vin(dst, cap, inner), True, "ua/coe-zero")
            if src == DIM1:
                return StepsTo(_coe_v_one(m), True, "ua/coe-one")
            return StepsTo(_coe_v_diag(m), False, "ua/coe-diag")
        case S.V(r, a, b, e) if isinstance(r, DimName):
            return StepsTo(_coe_v_other(m), False, "ua/coe-other")
        case S.Fcom() if _fcom_value(ty):
            return StepsTo(_coe_fcom(m), False, "univ/coe-fcom")
    return None


def _coe_v_one(m: S.Coe) -> Term:
    x, ty, dst, cap = m.dvar, m.ty, m.dst, m.cap
    b, e = ty.b, ty.equiv
    av = set(fd(m)) | {x}
    y = fresh_name("y", av)
    u = fresh_name("_", av | {y})
    back = S.Coe(x, b, DIM1, dst, cap)
    center = S.Fst(S.App(S.Snd(dsubst(e, dst, x)), back))
    hcom = S.Hcom(
        dsubst(b, dst, x),
        DIM1,
        DIM0,
        back,
        (
            Tube(Equation(dst, DIM0), y, S.DApp(S.Snd(center), DimName(y))),
            Tube(Equation(dst, DIM1), u, back),
        ),
    )
    return S.Vin(dst, S.Fst(center), hcom)


def _coe_v_diag(m: S.Coe) -> Term:
    """Coercion from a dimension name at a V type in its own direction."""
    x, ty, src, dst, cap = m.dvar, m.ty, m.src, m.dst, m.cap
    a, b, e = ty.a, ty.b, ty.equiv
    y = src.name
    av = set(fd(m)) | {x}
    w = fresh_name("w", av)
    z = fresh_name("z", av | {w})
    u = fresh_name("_", av | {w, z})

    def o_eps(eps: Dim) -> Term:
        return S.Vproj(
            DimName(w),
            S.Coe(x, ty, eps, DimName(w), cap),
            S.Fst(dsubst(e, DimName(w), x)),
        )

    p = S.Com(
        x,
        b,
        src,
        DimName(x),
        S.Vproj(src, cap, S.Fst(dsubst(e, src, x))),
        (
            Tube(Equation(src, DIM0), w, o_eps(DIM0)),
            Tube(Equation(src, DIM1), w, o_eps(DIM1)),
        ),
    )
    a0 = dsubst(a, DIM0, x)
    b0 = dsubst(b, DIM0, x)
    e0 = dsubst(e, DIM0, x)
    p0 = dsubst(p, DIM0, x)

    def q_eps(eps: Dim, arg: Term) -> Term:
        upper = S.Com(
            y,
            b0,
            eps,
            DimName(y),
            dsubst(p0, eps, y),
            (
                Tube(
                    Equation(DimName(z), DIM0),
                    y,
                    S.App(S.Fst(e0), S.Coe(y, a0, eps, DimName(y), arg)),
                ),
                Tube(Equation(DimName(z), DIM1), y, p0),
            ),
        )
        return S.Pair(S.Coe(y, a0, eps, DimName(y), arg), S.DLam(z, upper))

    big_r = S.DApp(
        S.App(
            S.App(
                S.Snd(S.App(S.Snd(e0), p0)),
                q_eps(DIM0, dsubst(cap, DIM0, y)),
            ),
            q_eps(DIM1, dsubst(S.Coe(x, ty, DIM1, DIM0, cap), DIM1, y)),
        ),
        DimName(y),
    )
    tubes = (
        Tube(Equation(src, DIM0), u, dsubst(o_eps(DIM0), dst, w)),
        Tube(Equation(src, DIM1), u, dsubst(o_eps(DIM1), dst, w)),
        Tube(Equation(src, dst), u, S.Vproj(dst, cap, S.Fst(dsubst(e, dst, x)))),
        Tube(Equation(dst, DIM0), z, S.DApp(S.Snd(big_r), DimName(z))),
    )
    hcom = S.Hcom(dsubst(b, dst, x), DIM1, DIM0, dsubst(p, dst, x), tubes)
    return S.Vin(dst, S.Fst(big_r), hcom)


def _coe_v_other(m: S.Coe) -> Term:
    """Coercion along a direction the V type does not vary in."""
    yb, ty, src, dst, cap = m.dvar, m.ty, m.src, m.dst, m.cap
    xd, a, b, e = ty.r, ty.a, ty.b, ty.equiv
    tubes = (
        Tube(Equation(xd, DIM0), yb, S.App(S.Fst(e), S.Coe(yb, a, src, DimName(yb), cap))),
        Tube(Equation(xd, DIM1), yb, S.Coe(yb, b, src, DimName(yb), cap)),
    )
    com = S.Com(yb, b, src, dst, S.Vproj(xd, cap, S.Fst(dsubst(e, src, yb))), tubes)
    return S.Vin(xd, S.Coe(yb, a, src, dst, cap), com)


def _coe_fcom(m: S.Coe) -> Term:
    """Coercion in a formal composite type: the box-building rule."""
    x, ty, r, r2, cap = m.dvar, m.ty, m.src, m.dst, m.cap
    s, s2, a, tsys = ty.src, ty.dst, ty.cap, ty.sys
    av = set(fd(m)) | {x}
    z = fresh_name("z", av)

    def apart_from_x(eq: Equation) -> bool:
        return _name(eq.lhs) != x and _name(eq.rhs) != x

    def n_i(tb: Tube) -> Term:
        zi, bi = tb.y, tb.body
        inner = S.Coe(x, dsubst(bi, s2, zi), r, DimName(x), cap)
        return S.Coe(zi, bi, s2, DimName(z), inner)

    big_o = dsubst(
        S.Hcom(
            a,
            s2,
            DimName(z),
            S.Cap(s, s2, cap, tsys),
            tuple(
                Tube(tb.eq, z, S.Coe(tb.y, tb.body, DimName(z), s, n_i(tb))) for tb in tsys
            ),
        ),
        r,
        x,
    )
    p_tubes = tuple(
        Tube(tb.eq, x, dsubst(n_i(tb), s, z)) for tb in tsys if apart_from_x(tb.eq)
    )
    if _name(s) != x and _name(s2) != x:
        p_tubes = p_tubes + (
            Tube(Equation(s, s2), x, S.Coe(x, a, r, DimName(x), cap)),
        )
    p = S.Gcom(x, a, r, r2, dsubst(big_o, _dim_subst(s, r, x), z), p_tubes)

    def q_k(k: int) -> Term:
        tb = tsys[k]
        tubes = tuple(
            Tube(t.eq, z, dsubst(n_i(t), r2, x)) for t in tsys if apart_from_x(t.eq)
        ) + (Tube(Equation(r, r2), z, dsubst(n_i(tb), r2, x)),)
        return S.Gcom(
            tb.y, dsubst(tb.body, r2, x), _dim_subst(s, r2, x), DimName(z), p, tubes
        )

    qs = [q_k(k) for k in range(len(tsys))]
    hcom_tubes = tuple(
        Tube(tb.eq, z, S.Coe(tb.y, tb.body, DimName(z), s, qs[k]))
        for k, tb in enumerate(tsys)
    ) + (Tube(Equation(r, r2), z, big_o),)
    box = S.Box(
        s,
        s2,
        S.Hcom(a, s, s2, p, hcom_tubes),
        tuple(Face(tb.eq, dsubst(qs[k], s2, z)) for k, tb in enumerate(tsys)),
    )
    return dsubst(box, r2, x)


# ---------------------------------------------------------------------------
# Remaining Kan unfoldings


def _com_tubes(m, binder: str, ty: Term, dst: Dim, sys) -> tuple:
    av = set(fd(m))
    out = []
    for t in sys:
        t = _open_tube(t, av)
        out.append(Tube(t.eq, t.y, S.Coe(binder, ty, DimName(t.y), dst, t.body)))
    return tuple(out)


def _com_unfold(m: S.Com) -> Term:
    y, ty, src, dst, cap, sys = m.dvar, m.ty, m.src, m.dst, m.cap, m.sys
    return S.Hcom(
        dsubst(ty, dst, y),
        src,
        dst,
        S.Coe(y, ty, src, dst, cap),
        _com_tubes(m, y, ty, dst, sys),
    )


def _gcom_unfold(m: S.Gcom) -> Term:
    y, ty, src, dst, cap, sys = m.dvar, m.ty, m.src, m.dst, m.cap, m.sys
    return S.Ghcom(
        dsubst(ty, dst, y),
        src,
        dst,
        S.Coe(y, ty, src, dst, cap),
        _com_tubes(m, y, ty, dst, sys),
    )


def _ghcom_split(m: S.Ghcom) -> Term:
    ty, src, dst, cap, sys = m.ty, m.src, m.dst, m.cap, m.sys
    av = set(fd(m))
    first = _open_tube(sys[0], av)
    rest = sys[1:]
    s, s2 = first.eq.lhs, first.eq.rhs
    z = fresh_name("z", av | {first.y})

    def t_eps(eps: Dim) -> Term:
        inner = S.Ghcom(ty, src, DimName(first.y), cap, rest)
        tubes = (
            Tube(Equation(s2, eps), first.y, first.body),
            Tube(Equation(s2, dim_flip(eps)), first.y, inner),
        ) + rest
        return S.Hcom(ty, src, DimName(z), cap, tubes)

    tubes = (
        Tube(Equation(s, DIM0), z, t_eps(DIM0)),
        Tube(Equation(s, DIM1), z, t_eps(DIM1)),
        sys[0],
    ) + rest
    return S.Hcom(ty, src, dst, cap, tubes)


def _if_fcom(m: S.If) -> Term:
    b, motive, scrut, tc, fc = m.bvar, m.motive, m.scrut, m.tcase, m.fcase
    av = set(fd(m))
    z = fresh_name("z", av)
    filler = S.Fcom(scrut.src, DimName(z), scrut.cap, scrut.sys)
    wrap = lambda n: S.If(b, motive, n, tc, fc)
    return S.Com(
        z,
        tsubst(motive, filler, b),
        scrut.src,
        scrut.dst,
        wrap(scrut.cap),
        _map_tubes(scrut.sys, wrap, av | {z}),
    )


def _circelim_fcom(m: S.CircElim) -> Term:
    c, motive, scrut, p, x, l = m.cvar, m.motive, m.scrut, m.base_case, m.dvar, m.loop_case
    av = set(fd(m))
    z = fresh_name("z", av)
    filler = S.Fcom(scrut.src, DimName(z), scrut.cap, scrut.sys)
    wrap = lambda n: S.CircElim(c, motive, n, p, x, l)
    return S.Com(
        z,
        tsubst(motive, filler, c),
        scrut.src,
        scrut.dst,
        wrap(scrut.cap),
        _map_tubes(scrut.sys, wrap, av | {z}),
    )


# ---------------------------------------------------------------------------
# Multi-step evaluation


@dataclass
class Trace:
    initial: Term
    steps: list = field(default_factory=list)  # (term-after, rule, stable, via)
    final: StepOutcome | None = None
    fuel_used: int = 0

    def to_json(self):
        from .syntax import term_to_json

        final: dict
        if isinstance(self.final, Value):
            final = {"outcome": "value", "stable": self.final.stable, "rule": self.final.rule}
        elif isinstance(self.final, Stuck):
            final = {"outcome": "stuck", "reason": self.final.reason}
        else:
            final = {"outcome": "fuel-exhausted"}
        return {
            "initial": term_to_json(self.initial),
            "steps": [
                {"term": term_to_json(t), "rule": r, "stable": st, "via": via}
                for t, r, st, via in self.steps
            ],
            "final": final,
            "fuel_used": self.fuel_used,
        }


def trace(m: Term, fuel: int = DEFAULT_FUEL) -> Trace:
    """The full step sequence of a term, up to the fuel bound."""
    if fv(m):
        raise OpenTermError(f"free term variables {sorted(fv(m))} in {pretty(m)}")
    out = Trace(m)
    cur = m
    for _ in range(fuel):
        res = _head(cur)
        if isinstance(res, StepsTo):
            out.steps.append((res.term, res.rule, res.stable, res.via))
            out.fuel_used += 1
            cur = res.term
        else:
            out.final = res
            return out
    out.final = None
    return out


def eval_term(m: Term, fuel: int = DEFAULT_FUEL) -> tuple[Term, bool]:
    """Evaluate to a canonical form; the flag records the value's stability."""
    if fv(m):
        raise OpenTermError(f"free term variables {sorted(fv(m))} in {pretty(m)}")
    cur = m
    for _ in range(fuel):
        res = _head(cur)
        if isinstance(res, StepsTo):
            cur = res.term
        elif isinstance(res, Value):
            return cur, res.stable
        else:
            raise StuckError(cur, res.reason)
    raise FuelExhausted(cur, fuel)


def force_numeral(m: Term, fuel: int = DEFAULT_FUEL) -> int:
    """Evaluate a natural-number program all the way to a numeral.

    Successors are values regardless of their argument, so reading off a
    numeral means evaluating, peeling one suc, and repeating.
    """
    count = 0
    while True:
        v, _ = eval_term(m, fuel)
        if isinstance(v, S.Zero):
            return count
        if isinstance(v, S.Suc):
            count += 1
            m = v.n
            continue
        raise StuckError(v, f"not a numeral: {pretty(v)}")
