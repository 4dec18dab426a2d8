"""The term language: AST, binders, substitution, alpha-equality, JSON form.

Terms carry two sorts of binders: term binders (written ``a. M``) and
dimension binders (written ``x. M``).  Binders are nameful; capture is
avoided lazily, by renaming at substitution time.  Deliberate capture -- an
idiom the Kan-operation unfoldings rely on -- is expressed by constructing a
binder node directly over a body with free occurrences of the bound name.

Every constructor is described once in the ``SIG`` table below (field kinds
plus binding structure); free-variable computation, substitution,
alpha-equality, and JSON serialization are generic folds over that table.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Iterable

from .cube import (
    DIM0,
    DIM1,
    Dim,
    DimConst,
    DimName,
    DimSubst,
    Equation,
    ScopeError,
    fresh_name,
)


@dataclass(frozen=True)
class Term:
    """Base class for all term constructors."""


# --- types -----------------------------------------------------------------


@dataclass(frozen=True)
class Pi(Term):
    var: str
    dom: Term
    cod: Term  # binds var


@dataclass(frozen=True)
class Sg(Term):
    var: str
    dom: Term
    cod: Term  # binds var


@dataclass(frozen=True)
class Path(Term):
    dvar: str
    ty: Term  # binds dvar
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Eq(Term):
    ty: Term
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Void(Term):
    pass


@dataclass(frozen=True)
class Nat(Term):
    pass


@dataclass(frozen=True)
class Bool(Term):
    pass


@dataclass(frozen=True)
class WBool(Term):
    pass


@dataclass(frozen=True)
class Circle(Term):
    pass


@dataclass(frozen=True)
class UPre(Term):
    level: int


@dataclass(frozen=True)
class UKan(Term):
    level: int


@dataclass(frozen=True)
class V(Term):
    """The univalence type whose r=0 face is `a` and r=1 face is `b`."""

    r: Dim
    a: Term
    b: Term
    equiv: Term


@dataclass(frozen=True)
class Vin(Term):
    r: Dim
    m: Term
    n: Term


@dataclass(frozen=True)
class Vproj(Term):
    r: Dim
    m: Term
    f: Term


# --- functions, pairs, paths -----------------------------------------------


@dataclass(frozen=True)
class Var(Term):
    name: str


@dataclass(frozen=True)
class Lam(Term):
    var: str
    body: Term  # binds var


@dataclass(frozen=True)
class App(Term):
    fn: Term
    arg: Term


@dataclass(frozen=True)
class Pair(Term):
    fst: Term
    snd: Term


@dataclass(frozen=True)
class Fst(Term):
    pair: Term


@dataclass(frozen=True)
class Snd(Term):
    pair: Term


@dataclass(frozen=True)
class DLam(Term):
    dvar: str
    body: Term  # binds dvar


@dataclass(frozen=True)
class DApp(Term):
    fn: Term
    r: Dim


@dataclass(frozen=True)
class Star(Term):
    pass


# --- natural numbers, booleans, circle --------------------------------------


@dataclass(frozen=True)
class Zero(Term):
    pass


@dataclass(frozen=True)
class Suc(Term):
    n: Term


@dataclass(frozen=True)
class NatRec(Term):
    scrut: Term
    zcase: Term
    nvar: str
    avar: str
    scase: Term  # binds nvar, avar


@dataclass(frozen=True)
class True_(Term):
    pass


@dataclass(frozen=True)
class False_(Term):
    pass


@dataclass(frozen=True)
class If(Term):
    bvar: str
    motive: Term  # binds bvar
    scrut: Term
    tcase: Term
    fcase: Term


@dataclass(frozen=True)
class Base(Term):
    pass


@dataclass(frozen=True)
class Loop(Term):
    r: Dim


@dataclass(frozen=True)
class CircElim(Term):
    cvar: str
    motive: Term  # binds cvar
    scrut: Term
    base_case: Term
    dvar: str
    loop_case: Term  # binds dvar


# --- Kan operations ----------------------------------------------------------


@dataclass(frozen=True)
class Tube:
    """One side of an open box: an equation plus a dimension-binder body."""

    eq: Equation
    y: str
    body: Term  # binds y


System = tuple  # of Tube, order-significant


@dataclass(frozen=True)
class Face:
    """An equation paired with a term (no bound dimension); used by box."""

    eq: Equation
    body: Term


@dataclass(frozen=True)
class Coe(Term):
    dvar: str
    ty: Term  # binds dvar
    src: Dim
    dst: Dim
    cap: Term


@dataclass(frozen=True)
class Hcom(Term):
    ty: Term
    src: Dim
    dst: Dim
    cap: Term
    sys: System


@dataclass(frozen=True)
class Com(Term):
    dvar: str
    ty: Term  # binds dvar
    src: Dim
    dst: Dim
    cap: Term
    sys: System


@dataclass(frozen=True)
class Fcom(Term):
    src: Dim
    dst: Dim
    cap: Term
    sys: System


@dataclass(frozen=True)
class Ghcom(Term):
    ty: Term
    src: Dim
    dst: Dim
    cap: Term
    sys: System


@dataclass(frozen=True)
class Gcom(Term):
    dvar: str
    ty: Term  # binds dvar
    src: Dim
    dst: Dim
    cap: Term
    sys: System


@dataclass(frozen=True)
class Box(Term):
    src: Dim
    dst: Dim
    cap: Term
    faces: tuple  # of Face


@dataclass(frozen=True)
class Cap(Term):
    src: Dim
    dst: Dim
    box: Term
    sys: System


# ---------------------------------------------------------------------------
# Signature table
#
# Field kinds:
#   "term"  plain subterm          "dim"   dimension occurrence
#   "tvar"  term-binder name       "dvar"  dimension-binder name
#   "level" universe level         "name"  free term-variable name (Var only)
#   "sys"   tuple of Tube          "faces" tuple of Face
#
# A field kind may be a tuple ("term", bound) where bound lists the *indices*
# of earlier tvar/dvar fields whose names are bound in this subterm.

def _sig(*kinds):
    out = []
    for k in kinds:
        out.append(k if isinstance(k, tuple) else (k, ()))
    return tuple(out)


SIG = {
    Var: _sig("name"),
    Pi: _sig("tvar", "term", ("term", (0,))),
    Sg: _sig("tvar", "term", ("term", (0,))),
    Path: _sig("dvar", ("term", (0,)), "term", "term"),
    Eq: _sig("term", "term", "term"),
    Void: _sig(),
    Nat: _sig(),
    Bool: _sig(),
    WBool: _sig(),
    Circle: _sig(),
    UPre: _sig("level"),
    UKan: _sig("level"),
    V: _sig("dim", "term", "term", "term"),
    Vin: _sig("dim", "term", "term"),
    Vproj: _sig("dim", "term", "term"),
    Lam: _sig("tvar", ("term", (0,))),
    App: _sig("term", "term"),
    Pair: _sig("term", "term"),
    Fst: _sig("term"),
    Snd: _sig("term"),
    DLam: _sig("dvar", ("term", (0,))),
    DApp: _sig("term", "dim"),
    Star: _sig(),
    Zero: _sig(),
    Suc: _sig("term"),
    NatRec: _sig("term", "term", "tvar", "tvar", ("term", (2, 3))),
    True_: _sig(),
    False_: _sig(),
    If: _sig("tvar", ("term", (0,)), "term", "term", "term"),
    Base: _sig(),
    Loop: _sig("dim"),
    CircElim: _sig("tvar", ("term", (0,)), "term", "term", "dvar", ("term", (4,))),
    Coe: _sig("dvar", ("term", (0,)), "dim", "dim", "term"),
    Hcom: _sig("term", "dim", "dim", "term", "sys"),
    Com: _sig("dvar", ("term", (0,)), "dim", "dim", "term", "sys"),
    Fcom: _sig("dim", "dim", "term", "sys"),
    Ghcom: _sig("term", "dim", "dim", "term", "sys"),
    Gcom: _sig("dvar", ("term", (0,)), "dim", "dim", "term", "sys"),
    Box: _sig("dim", "dim", "term", "faces"),
    Cap: _sig("dim", "dim", "term", "sys"),
}

_FIELDS = {cls: tuple(f.name for f in fields(cls)) for cls in SIG}


def _parts(m: Term):
    cls = type(m)
    sig = SIG[cls]
    names = _FIELDS[cls]
    return cls, sig, names, [getattr(m, n) for n in names]


# ---------------------------------------------------------------------------
# Free names


def _eq_names(eq: Equation, out: set):
    for d in (eq.lhs, eq.rhs):
        if isinstance(d, DimName):
            out.add(d.name)


def fd(m: Term) -> frozenset:
    """The set of dimension names free in a term."""
    cached = getattr(m, "_fd", None)
    if cached is not None:
        return cached
    cls, sig, names, vals = _parts(m)
    out: set = set()
    for (kind, bound), val in zip(sig, vals):
        if kind == "dim":
            if isinstance(val, DimName):
                out.add(val.name)
        elif kind == "term":
            sub = set(fd(val))
            for i in bound:
                if sig[i][0] == "dvar":
                    sub.discard(vals[i])
            out |= sub
        elif kind == "sys":
            for tube in val:
                _eq_names(tube.eq, out)
                out |= fd(tube.body) - {tube.y}
        elif kind == "faces":
            for face in val:
                _eq_names(face.eq, out)
                out |= fd(face.body)
    result = frozenset(out)
    object.__setattr__(m, "_fd", result)
    return result


def fv(m: Term) -> frozenset:
    """The set of term variables free in a term."""
    cached = getattr(m, "_fv", None)
    if cached is not None:
        return cached
    if isinstance(m, Var):
        result = frozenset({m.name})
    else:
        cls, sig, names, vals = _parts(m)
        out: set = set()
        for (kind, bound), val in zip(sig, vals):
            if kind == "term":
                sub = set(fv(val))
                for i in bound:
                    if sig[i][0] == "tvar":
                        sub.discard(vals[i])
                out |= sub
            elif kind == "sys":
                for tube in val:
                    out |= fv(tube.body)
            elif kind == "faces":
                for face in val:
                    out |= fv(face.body)
        result = frozenset(out)
    object.__setattr__(m, "_fv", result)
    return result


# ---------------------------------------------------------------------------
# Substitution

def _subst_eq(eq: Equation, env: dict) -> Equation:
    def go(d: Dim) -> Dim:
        if isinstance(d, DimName) and d.name in env:
            return env[d.name]
        return d

    return Equation(go(eq.lhs), go(eq.rhs))


def _open_dim_binder(y: str, body: Term, env: dict):
    """Prepare to substitute `env` under the dimension binder y.

    Drops the shadowed entry, and renames the binder when some remaining
    entry would insert the bound name into the body.
    """
    sub_env = {k: v for k, v in env.items() if k != y}
    live = {k for k in sub_env if k in fd(body)}
    if not live:
        return y, body, {}
    captured = any(
        isinstance(sub_env[k], DimName) and sub_env[k].name == y for k in live
    )
    if captured:
        avoid = set(sub_env) | fd(body)
        for v in sub_env.values():
            if isinstance(v, DimName):
                avoid.add(v.name)
        y2 = fresh_name(y, avoid)
        body = _dsubst_env(body, {y: DimName(y2)})
        y = y2
    return y, body, {k: sub_env[k] for k in live}


def _dsubst_env(m: Term, env: dict) -> Term:
    """Simultaneous dimension substitution by an explicit environment."""
    if not env or not (fd(m) & env.keys()):
        return m
    cls, sig, names, vals = _parts(m)
    new_vals = list(vals)

    for i, ((kind, bound), val) in enumerate(zip(sig, vals)):
        if kind == "dim":
            if isinstance(val, DimName) and val.name in env:
                new_vals[i] = env[val.name]
        elif kind == "term":
            dvar_idx = next((b for b in bound if sig[b][0] == "dvar"), None)
            if dvar_idx is None:
                new_vals[i] = _dsubst_env(val, env)
            else:
                y, body, sub_env = _open_dim_binder(vals[dvar_idx], val, env)
                new_vals[dvar_idx] = y
                new_vals[i] = _dsubst_env(body, sub_env)
        elif kind == "sys":
            new_vals[i] = tuple(_tube_dsubst(t, env) for t in val)
        elif kind == "faces":
            new_vals[i] = tuple(
                Face(_subst_eq(f.eq, env), _dsubst_env(f.body, env)) for f in val
            )
    return cls(*new_vals)


def _tube_dsubst(t: Tube, env: dict) -> Tube:
    eq = _subst_eq(t.eq, env)
    y, body, sub_env = _open_dim_binder(t.y, t.body, env)
    return Tube(eq, y, _dsubst_env(body, sub_env))


def dsubst(m: Term, r: Dim, x: str) -> Term:
    """Capture-avoiding substitution of the dimension r for the name x."""
    return _dsubst_env(m, {x: r})


def apply_subst(m: Term, psi: DimSubst) -> Term:
    """Apply a total dimension substitution to a term."""
    missing = fd(m) - psi.source
    if missing:
        raise ScopeError(f"term has free dimensions {sorted(missing)} outside {sorted(psi.source)}")
    return _dsubst_env(m, dict(psi.map))


def _tsubst_env(m: Term, env: dict) -> Term:
    if not env or not (fv(m) & env.keys()):
        return m
    if isinstance(m, Var):
        return env.get(m.name, m)
    cls, sig, names, vals = _parts(m)
    tclash: set = set()
    dclash: set = set()
    for v in env.values():
        tclash |= fv(v)
        dclash |= fd(v)
    new_vals = list(vals)

    for i, ((kind, bound), val) in enumerate(zip(sig, vals)):
        if kind == "term":
            body = val
            sub_env = {k: v for k, v in env.items()}
            for b in bound:
                bkind = sig[b][0]
                old = vals[b]
                if bkind == "tvar":
                    sub_env.pop(old, None)
                    live = fv(body) & sub_env.keys()
                    if live and old in tclash:
                        nm = fresh_name(old, tclash | fv(body) | set(sub_env))
                        body = _tsubst_env(body, {old: Var(nm)})
                        new_vals[b] = nm
                elif bkind == "dvar":
                    live = fv(body) & sub_env.keys()
                    if live and old in dclash:
                        nm = fresh_name(old, dclash | fd(body))
                        body = _dsubst_env(body, {old: DimName(nm)})
                        new_vals[b] = nm
            new_vals[i] = _tsubst_env(body, sub_env)
        elif kind == "sys":
            new_vals[i] = tuple(_tube_tsubst(t, env, dclash) for t in val)
        elif kind == "faces":
            new_vals[i] = tuple(Face(f.eq, _tsubst_env(f.body, env)) for f in val)
    return cls(*new_vals)


def _tube_tsubst(t: Tube, env: dict, dclash: set) -> Tube:
    y, body = t.y, t.body
    if y in dclash and (fv(body) & env.keys()):
        y2 = fresh_name(y, dclash | fd(body))
        body = _dsubst_env(body, {y: DimName(y2)})
        y = y2
    return Tube(t.eq, y, _tsubst_env(body, env))


def tsubst(m: Term, n: Term, a: str) -> Term:
    """Capture-avoiding substitution of the term n for the variable a."""
    return _tsubst_env(m, {a: n})


def tsubst_many(m: Term, pairs: Iterable[tuple]) -> Term:
    """Iterated term substitution, leftmost pair applied first."""
    for n, a in pairs:
        m = tsubst(m, n, a)
    return m


# ---------------------------------------------------------------------------
# Alpha-equality


class _Rho:
    """A bijective renaming of bound names; free names match only themselves."""

    __slots__ = ("map", "used")

    def __init__(self, base: "_Rho | None" = None):
        self.map = dict(base.map) if base else {}
        self.used = set(base.used) if base else set()

    def bind(self, a: str, b: str) -> "_Rho":
        out = _Rho(self)
        out.map[a] = b
        out.used.add(b)
        return out

    def match(self, a: str, b: str) -> bool:
        if a in self.map:
            return self.map[a] == b
        return a == b and b not in self.used


def alpha_eq(m: Term, n: Term) -> bool:
    """Equality up to consistent renaming of bound term and dimension names."""
    return _alpha(m, n, _Rho(), _Rho())


def _alpha(m: Term, n: Term, rho_t: _Rho, rho_d: _Rho):
    if type(m) is not type(n):
        return False
    if isinstance(m, Var):
        return rho_t.match(m.name, n.name)
    cls, sig, names, mvals = _parts(m)
    nvals = [getattr(n, f) for f in names]
    for (kind, bound), mv, nv in zip(sig, mvals, nvals):
        if kind in ("tvar", "dvar", "name"):
            continue  # binder names handled at their use sites
        if kind == "level":
            if mv != nv:
                return False
        elif kind == "dim":
            if not _dim_match(mv, nv, rho_d):
                return False
        elif kind == "term":
            rt, rd = rho_t, rho_d
            for b in bound:
                if sig[b][0] == "tvar":
                    rt = rt.bind(mvals[b], nvals[b])
                else:
                    rd = rd.bind(mvals[b], nvals[b])
            if not _alpha(mv, nv, rt, rd):
                return False
        elif kind == "sys":
            if len(mv) != len(nv):
                return False
            for tm, tn in zip(mv, nv):
                if not _dim_match(tm.eq.lhs, tn.eq.lhs, rho_d):
                    return False
                if not _dim_match(tm.eq.rhs, tn.eq.rhs, rho_d):
                    return False
                if not _alpha(tm.body, tn.body, rho_t, rho_d.bind(tm.y, tn.y)):
                    return False
        elif kind == "faces":
            if len(mv) != len(nv):
                return False
            for fm, fn in zip(mv, nv):
                if not _dim_match(fm.eq.lhs, fn.eq.lhs, rho_d):
                    return False
                if not _dim_match(fm.eq.rhs, fn.eq.rhs, rho_d):
                    return False
                if not _alpha(fm.body, fn.body, rho_t, rho_d):
                    return False
    return True


def _dim_match(a: Dim, b: Dim, rho_d: _Rho) -> bool:
    if isinstance(a, DimConst) or isinstance(b, DimConst):
        return a == b
    return rho_d.match(a.name, b.name)


# ---------------------------------------------------------------------------
# JSON serialization (constructor tag + fields)

_BY_NAME = {cls.__name__: cls for cls in SIG}


def dim_to_json(d: Dim):
    return d.value if isinstance(d, DimConst) else {"name": d.name}


def dim_from_json(obj) -> Dim:
    if obj == 0:
        return DIM0
    if obj == 1:
        return DIM1
    if isinstance(obj, dict) and "name" in obj:
        return DimName(obj["name"])
    raise ValueError(f"bad dimension JSON: {obj!r}")


def eq_to_json(eq: Equation):
    return [dim_to_json(eq.lhs), dim_to_json(eq.rhs)]


def eq_from_json(obj) -> Equation:
    return Equation(dim_from_json(obj[0]), dim_from_json(obj[1]))


def term_to_json(m: Term):
    cls, sig, names, vals = _parts(m)
    out = []
    for (kind, _), val in zip(sig, vals):
        if kind in ("tvar", "dvar", "level", "name"):
            out.append(val)
        elif kind == "dim":
            out.append(dim_to_json(val))
        elif kind == "term":
            out.append(term_to_json(val))
        elif kind == "sys":
            out.append([[eq_to_json(t.eq), t.y, term_to_json(t.body)] for t in val])
        elif kind == "faces":
            out.append([[eq_to_json(f.eq), term_to_json(f.body)] for f in val])
    return {"t": cls.__name__, "f": out}


def term_from_json(obj) -> Term:
    if not isinstance(obj, dict) or "t" not in obj:
        raise ValueError(f"bad term JSON: {obj!r}")
    cls = _BY_NAME.get(obj["t"])
    if cls is None:
        raise ValueError(f"unknown constructor: {obj['t']}")
    sig = SIG[cls]
    raw = obj.get("f", [])
    if len(raw) != len(sig):
        raise ValueError(f"{obj['t']} expects {len(sig)} fields, got {len(raw)}")
    vals = []
    for (kind, _), val in zip(sig, raw):
        if kind in ("tvar", "dvar", "name"):
            vals.append(str(val))
        elif kind == "level":
            vals.append(int(val))
        elif kind == "dim":
            vals.append(dim_from_json(val))
        elif kind == "term":
            vals.append(term_from_json(val))
        elif kind == "sys":
            vals.append(tuple(Tube(eq_from_json(e), y, term_from_json(b)) for e, y, b in val))
        elif kind == "faces":
            vals.append(tuple(Face(eq_from_json(e), term_from_json(b)) for e, b in val))
    return cls(*vals)


# ---------------------------------------------------------------------------
# Convenience constructors used throughout the package

TRUE = True_()
FALSE = False_()
STAR = Star()
ZERO = Zero()
BOOL = Bool()
WBOOL = WBool()
NAT = Nat()
CIRCLE = Circle()
VOID = Void()


def arrow(a: Term, b: Term, var: str = "_a") -> Term:
    """Non-dependent function type."""
    return Pi(var, a, b)


def numeral(k: int) -> Term:
    out: Term = ZERO
    for _ in range(k):
        out = Suc(out)
    return out
