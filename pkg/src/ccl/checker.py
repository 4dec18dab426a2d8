"""A derivation checker for the proof-rule compendium.

Judgments are data; rules are schemas; derivations are explicit trees whose
nodes name a rule and carry a full instantiation of its metavariables.
Checking a node means: instantiate the schema, compare the claimed
conclusion with the instantiated one (up to restriction normalization and
alpha), match children against premises in order, and discharge side
conditions (stable steps via the machine, level comparisons arithmetically,
freshness syntactically).

There is no unification and no proof search: every ``B[N/a]``-shaped
conclusion is computed from the instantiation, never matched against.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .cube import (
    DIM0,
    DIM1,
    Dim,
    DimConst,
    DimName,
    DimSubst,
    Equation,
    ScopeError,
    dim_flip,
    valid,
)
from . import syntax as S
from . import opsem
from .parser import pretty
from .syntax import (
    Term,
    Tube,
    Face,
    alpha_eq,
    dim_from_json,
    dim_to_json,
    dsubst,
    eq_from_json,
    eq_to_json,
    fd,
    fv,
    term_from_json,
    term_to_json,
    tsubst,
)

PRE = "pre"
KAN = "kan"


class CheckerError(Exception):
    pass


class InstantiationError(CheckerError):
    pass


# ---------------------------------------------------------------------------
# Judgments


@dataclass(frozen=True)
class EqType:
    kappa: str
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class EqTm:
    lhs: Term
    rhs: Term
    ty: Term


@dataclass(frozen=True)
class WfShape:
    eqs: tuple  # of Equation


Form = EqType | EqTm | WfShape


@dataclass(frozen=True)
class Judgment:
    psi: frozenset  # dimension names
    xi: tuple  # of Equation (the restriction)
    hyps: tuple  # of (variable, Term)
    form: Form

    def __post_init__(self):
        seen = set()
        for a, _ in self.hyps:
            if a in seen:
                raise CheckerError(f"duplicate hypothesis variable {a}")
            seen.add(a)
        free = _judgment_fd(self)
        if not free <= self.psi:
            raise ScopeError(
                f"judgment mentions dimensions {sorted(free - self.psi)} outside its context"
            )

    def with_xi(self, xi) -> "Judgment":
        return Judgment(self.psi, tuple(xi), self.hyps, self.form)

    def __str__(self) -> str:
        parts = []
        if self.psi:
            parts.append("[" + ", ".join(sorted(self.psi)) + "]")
        if self.xi:
            parts.append("<" + ", ".join(str(e) for e in self.xi) + ">")
        if self.hyps:
            parts.append(", ".join(f"{a} : {pretty(t)}" for a, t in self.hyps) + " |-")
        match self.form:
            case EqType(kappa, lhs, rhs):
                parts.append(f"{pretty(lhs)} = {pretty(rhs)} ({kappa} type)")
            case EqTm(lhs, rhs, ty):
                parts.append(f"{pretty(lhs)} = {pretty(rhs)} : {pretty(ty)}")
            case WfShape(eqs):
                parts.append("wfshape(" + ", ".join(str(e) for e in eqs) + ")")
        return " ".join(parts)


def _eq_names(eqs) -> set:
    out: set = set()
    for e in eqs:
        out |= e.names()
    return out


def _judgment_fd(j: Judgment) -> set:
    out = _eq_names(j.xi)
    for _, t in j.hyps:
        out |= fd(t)
    match j.form:
        case EqType(_, lhs, rhs):
            out |= fd(lhs) | fd(rhs)
        case EqTm(lhs, rhs, ty):
            out |= fd(lhs) | fd(rhs) | fd(ty)
        case WfShape(eqs):
            out |= _eq_names(eqs)
    return out


def _map_form(form: Form, f, feq) -> Form:
    match form:
        case EqType(kappa, lhs, rhs):
            return EqType(kappa, f(lhs), f(rhs))
        case EqTm(lhs, rhs, ty):
            return EqTm(f(lhs), f(rhs), f(ty))
        case WfShape(eqs):
            return WfShape(tuple(feq(e) for e in eqs))
    raise TypeError(form)


def _subst_eq(e: Equation, r: Dim, x: str) -> Equation:
    def go(d: Dim) -> Dim:
        return r if isinstance(d, DimName) and d.name == x else d

    return Equation(go(e.lhs), go(e.rhs))


def judgment_dsubst(j: Judgment, r: Dim, x: str) -> Judgment:
    """Substitute a single dimension, removing x from the context."""
    if x not in j.psi:
        raise ScopeError(f"{x} not in judgment context {sorted(j.psi)}")
    if isinstance(r, DimName) and r.name not in (j.psi - {x}):
        raise ScopeError(f"substituted dimension {r} not in context")
    psi = j.psi - {x}
    return Judgment(
        psi,
        tuple(_subst_eq(e, r, x) for e in j.xi),
        tuple((a, dsubst(t, r, x)) for a, t in j.hyps),
        _map_form(j.form, lambda t: dsubst(t, r, x), lambda e: _subst_eq(e, r, x)),
    )


def judgment_apply(j: Judgment, psi: DimSubst) -> Judgment:
    """Apply a total dimension substitution to a whole judgment."""
    if psi.source != j.psi:
        raise ScopeError(
            f"substitution source {sorted(psi.source)} != judgment context {sorted(j.psi)}"
        )

    def on_eq(e: Equation) -> Equation:
        from .cube import apply_dim

        return Equation(apply_dim(psi, e.lhs), apply_dim(psi, e.rhs))

    return Judgment(
        psi.target,
        tuple(on_eq(e) for e in j.xi),
        tuple((a, S.apply_subst(t, psi)) for a, t in j.hyps),
        _map_form(j.form, lambda t: S.apply_subst(t, psi), on_eq),
    )


# ---------------------------------------------------------------------------
# Restriction normalization


@dataclass(frozen=True)
class Vacuous:
    """The restriction is unsatisfiable; the judgment holds trivially."""


@dataclass(frozen=True)
class Plain:
    judgments: tuple  # the unrestricted residue (always a single judgment)


def expand_restriction(j: Judgment, right_to_left: bool = False) -> Vacuous | Plain:
    """Translate a restricted judgment into an unrestricted one.

    Processes one equation at a time: reflexive equations are dropped, a
    constant clash makes the judgment vacuous, and a name is substituted
    away, shrinking the dimension context.
    """
    cur = j.with_xi(())
    pending = list(j.xi)
    while pending:
        e = pending.pop(-1 if right_to_left else 0)
        if e.lhs == e.rhs:
            continue
        if isinstance(e.lhs, DimConst) and isinstance(e.rhs, DimConst):
            return Vacuous()
        if isinstance(e.lhs, DimName):
            x, r = e.lhs.name, e.rhs
        else:
            x, r = e.rhs.name, e.lhs
        if x not in cur.psi:
            raise ScopeError(f"restriction name {x} not in context {sorted(cur.psi)}")
        pending = [_subst_eq(e2, r, x) for e2 in pending]
        cur = judgment_dsubst(cur, r, x)
    return Plain((cur,))


def _canon(j: Judgment) -> Judgment:
    """Rename hypothesis variables to a canonical spine for comparison."""
    env = {a: S.Var(f"#h{i}") for i, (a, _) in enumerate(j.hyps)}
    if not env:
        return j
    ren = lambda t: S._tsubst_env(t, env)
    hyps = tuple((f"#h{i}", ren(t)) for i, (_, t) in enumerate(j.hyps))
    return Judgment(j.psi, j.xi, hyps, _map_form(j.form, ren, lambda e: e))


def _plain_equal(a: Judgment, b: Judgment) -> bool:
    if a.psi != b.psi or len(a.hyps) != len(b.hyps):
        return False
    a, b = _canon(a), _canon(b)
    for (_, ta), (_, tb) in zip(a.hyps, b.hyps):
        if not alpha_eq(ta, tb):
            return False
    fa, fb = a.form, b.form
    if type(fa) is not type(fb):
        return False
    match fa, fb:
        case EqType(k1, l1, r1), EqType(k2, l2, r2):
            return k1 == k2 and alpha_eq(l1, l2) and alpha_eq(r1, r2)
        case EqTm(l1, r1, t1), EqTm(l2, r2, t2):
            return alpha_eq(l1, l2) and alpha_eq(r1, r2) and alpha_eq(t1, t2)
        case WfShape(e1), WfShape(e2):
            return e1 == e2
    return False


def judgment_matches(obligation: Judgment, support: Judgment) -> bool:
    """Whether `support` discharges `obligation`.

    Both are normalized; a vacuous obligation is discharged by anything.
    """
    ob = expand_restriction(obligation)
    if isinstance(ob, Vacuous):
        return True
    sup = expand_restriction(support)
    if isinstance(sup, Vacuous):
        return False
    return _plain_equal(ob.judgments[0], sup.judgments[0])


# ---------------------------------------------------------------------------
# Side conditions


@dataclass(frozen=True)
class SideCondition:
    kind: str
    args: tuple
    desc: str

    def check(self) -> str | None:
        """None when discharged, else a failure description."""
        k, a = self.kind, self.args
        if k == "step-stable":
            term, expected = a
            out = opsem.step(term)
            if not isinstance(out, opsem.StepsTo):
                return f"{self.desc}: term does not step"
            if not out.stable:
                return f"{self.desc}: step is not cubically stable ({out.rule})"
            if not alpha_eq(out.term, expected):
                return f"{self.desc}: steps to {pretty(out.term)}, not {pretty(expected)}"
            return None
        if k == "dim-eq":
            r1, r2 = a
            return None if r1 == r2 else f"{self.desc}: {r1} != {r2}"
        if k == "level-le":
            i, j = a
            return None if i <= j else f"{self.desc}: {i} > {j}"
        if k == "level-lt":
            i, j = a
            return None if i < j else f"{self.desc}: {i} >= {j}"
        if k == "fresh-var":
            name, terms = a
            for t in terms:
                if name in fv(t):
                    return f"{self.desc}: {name} occurs in {pretty(t)}"
            return None
        if k == "fresh-dim":
            name, dims = a
            for d in dims:
                if isinstance(d, DimName) and d.name == name:
                    return f"{self.desc}: {name} occurs in {d}"
            return None
        raise CheckerError(f"unknown side condition {k}")


# ---------------------------------------------------------------------------
# Instantiations


SORTS = (
    "term", "terms", "dim", "eps", "var", "name", "level", "index",
    "kappa", "judgment", "dimsubst", "eqs", "names", "hyps",
)


class Inst:
    """Typed access to a rule instantiation, plus the ambient contexts."""

    def __init__(self, raw: dict):
        self.raw = dict(raw)
        self.gamma: tuple = tuple(self.raw.pop("gamma", ()))
        psi = self.raw.pop("psi", None)
        if psi is None:
            names: set = set()
            for v in self.raw.values():
                names |= _value_fd(v)
            for _, t in self.gamma:
                names |= fd(t)
            self.psi = frozenset(names)
        else:
            self.psi = frozenset(psi)

    def _get(self, key: str, want):
        if key not in self.raw:
            raise InstantiationError(f"missing metavariable {key!r}")
        val = self.raw[key]
        if not want(val):
            raise InstantiationError(f"metavariable {key!r} has the wrong sort")
        return val

    def term(self, key) -> Term:
        return self._get(key, lambda v: isinstance(v, Term))

    def terms(self, key) -> tuple:
        return tuple(self._get(key, lambda v: isinstance(v, (list, tuple))
                     and all(isinstance(t, Term) for t in v)))

    def dim(self, key) -> Dim:
        return self._get(key, lambda v: isinstance(v, Dim))

    def eps(self, key) -> Dim:
        return self._get(key, lambda v: v in (DIM0, DIM1))

    def var(self, key) -> str:
        return self._get(key, lambda v: isinstance(v, str))

    def name(self, key) -> str:
        return self._get(key, lambda v: isinstance(v, str))

    def level(self, key) -> int:
        return self._get(key, lambda v: isinstance(v, int) and v >= 0)

    def index(self, key) -> int:
        return self._get(key, lambda v: isinstance(v, int) and v >= 0)

    def kappa(self, key) -> str:
        return self._get(key, lambda v: v in (PRE, KAN))

    def judgment(self, key) -> Judgment:
        return self._get(key, lambda v: isinstance(v, Judgment))

    def dimsubst(self, key) -> DimSubst:
        return self._get(key, lambda v: isinstance(v, DimSubst))

    def eqs(self, key) -> tuple:
        return tuple(self._get(key, lambda v: isinstance(v, (list, tuple))
                     and all(isinstance(e, Equation) for e in v)))

    # -- judgment builders at the ambient contexts --------------------------

    def _mk(self, form: Form, xi=(), dims=(), hyps_extra=()) -> Judgment:
        return Judgment(
            self.psi | set(dims), tuple(xi), self.gamma + tuple(hyps_extra), form
        )

    def eqtm(self, lhs, rhs, ty, xi=(), dims=(), hyps_extra=()) -> Judgment:
        return self._mk(EqTm(lhs, rhs, ty), xi, dims, hyps_extra)

    def oftype(self, m, ty, xi=(), dims=(), hyps_extra=()) -> Judgment:
        return self.eqtm(m, m, ty, xi, dims, hyps_extra)

    def eqtype(self, kappa, lhs, rhs, xi=(), dims=(), hyps_extra=()) -> Judgment:
        return self._mk(EqType(kappa, lhs, rhs), xi, dims, hyps_extra)

    def wftype(self, kappa, ty, xi=(), dims=(), hyps_extra=()) -> Judgment:
        return self.eqtype(kappa, ty, ty, xi, dims, hyps_extra)

    def wfshape(self, eqs) -> Judgment:
        return self._mk(WfShape(tuple(eqs)))


def _value_fd(v) -> set:
    if isinstance(v, Term):
        return set(fd(v))
    if isinstance(v, DimName):
        return {v.name}
    if isinstance(v, Equation):
        return set(v.names())
    if isinstance(v, Judgment):
        return set(v.psi)
    if isinstance(v, (list, tuple)):
        out: set = set()
        for x in v:
            out |= _value_fd(x)
        return out
    return set()


@dataclass
class RuleInstance:
    conclusion: Judgment
    premises: list
    side_conditions: list = field(default_factory=list)


@dataclass(frozen=True)
class Schema:
    rid: str
    metavars: dict
    desc: str
    build: object  # callable Inst -> RuleInstance

    def instantiate(self, raw: dict) -> RuleInstance:
        return self.build(Inst(raw))


RULES: dict[str, Schema] = {}


def _schema(rid: str, metavars: dict, desc: str):
    def register(fn):
        RULES[rid] = Schema(rid, metavars, desc, fn)
        return fn

    return register


def rule_catalog() -> list:
    """Every rule schema, as (identifier, schema) pairs."""
    return sorted(RULES.items())


def instantiate_rule(rid: str, raw: dict) -> RuleInstance:
    if rid not in RULES:
        raise InstantiationError(f"unknown rule {rid!r}")
    return RULES[rid].instantiate(raw)


# ---------------------------------------------------------------------------
# Schema helpers


def _tubes(eqs, y: str, bodies) -> tuple:
    if len(eqs) != len(bodies):
        raise InstantiationError("tube equations and bodies differ in length")
    return tuple(Tube(e, y, b) for e, b in zip(eqs, bodies))


def _faces(eqs, bodies) -> tuple:
    if len(eqs) != len(bodies):
        raise InstantiationError("face equations and bodies differ in length")
    return tuple(Face(e, b) for e, b in zip(eqs, bodies))


def is_contr(c: Term) -> Term:
    """The type of proofs that c is contractible."""
    path = S.Path("_x", c, S.Var("c1"), S.Var("c2"))
    return S.Sg("_c", c, S.Pi("c1", c, S.Pi("c2", c, path)))


def equiv_type(a: Term, b: Term) -> Term:
    """The type of equivalences between a and b."""
    fiber = S.Sg("a1", a, S.Path("_x", b, S.App(S.Var("f"), S.Var("a1")), S.Var("b1")))
    return S.Sg("f", S.arrow(a, b), S.Pi("b1", b, is_contr(fiber)))




# ---------------------------------------------------------------------------
# Structural rules


@_schema("struct/hypothesis", {"k": "index", "kappa": "kappa"},
         "a hypothesis names an element of its type")
def _(i: Inst):
    k = i.index("k")
    if k >= len(i.gamma):
        raise InstantiationError("hypothesis index out of range")
    a, ty = i.gamma[k]
    prefix = i.gamma[:k]
    return RuleInstance(
        conclusion=i.eqtm(S.Var(a), S.Var(a), ty),
        premises=[Judgment(i.psi, (), prefix, EqType(i.kappa("kappa"), ty, ty))],
    )


@_schema("struct/weakening", {"J": "judgment", "k": "index", "a": "var",
                              "A": "term", "kappa": "kappa"},
         "an unused hypothesis may be inserted at any position")
def _(i: Inst):
    j = i.judgment("J")
    k, a, ty = i.index("k"), i.var("a"), i.term("A")
    if k > len(j.hyps):
        raise InstantiationError("insertion position out of range")
    if any(a == b for b, _ in j.hyps):
        raise InstantiationError(f"variable {a} already bound in the context")
    hyps = j.hyps[:k] + ((a, ty),) + j.hyps[k:]
    concl = Judgment(j.psi, j.xi, hyps, j.form)
    used = [t for _, t in j.hyps[k:]]
    match j.form:
        case EqType(_, lhs, rhs):
            used += [lhs, rhs]
        case EqTm(lhs, rhs, t):
            used += [lhs, rhs, t]
    return RuleInstance(
        conclusion=concl,
        premises=[
            j,
            Judgment(j.psi, (), j.hyps[:k], EqType(i.kappa("kappa"), ty, ty)),
        ],
        side_conditions=[
            SideCondition("fresh-var", (a, tuple(used)), f"{a} unused in the judgment")
        ],
    )


@_schema("struct/dsubst", {"J": "judgment", "sub": "dimsubst"},
         "judgments are closed under total dimension substitution")
def _(i: Inst):
    j = i.judgment("J")
    sub = i.dimsubst("sub")
    return RuleInstance(conclusion=judgment_apply(j, sub), premises=[j])


@_schema("struct/kan-pre", {"A": "term", "A'": "term"},
         "Kan type equality entails pretype equality")
def _(i: Inst):
    a, a2 = i.term("A"), i.term("A'")
    return RuleInstance(
        conclusion=i.eqtype(PRE, a, a2), premises=[i.eqtype(KAN, a, a2)]
    )


@_schema("struct/type-sym", {"kappa": "kappa", "A": "term", "A'": "term"},
         "type equality is symmetric")
def _(i: Inst):
    k, a, a2 = i.kappa("kappa"), i.term("A"), i.term("A'")
    return RuleInstance(conclusion=i.eqtype(k, a2, a), premises=[i.eqtype(k, a, a2)])


@_schema("struct/type-trans", {"kappa": "kappa", "A": "term", "A'": "term", "A''": "term"},
         "type equality is transitive")
def _(i: Inst):
    k = i.kappa("kappa")
    a, b, c = i.term("A"), i.term("A'"), i.term("A''")
    return RuleInstance(
        conclusion=i.eqtype(k, a, c),
        premises=[i.eqtype(k, a, b), i.eqtype(k, b, c)],
    )


@_schema("struct/term-sym", {"M": "term", "M'": "term", "A": "term"},
         "element equality is symmetric")
def _(i: Inst):
    m, m2, a = i.term("M"), i.term("M'"), i.term("A")
    return RuleInstance(conclusion=i.eqtm(m, m2, a), premises=[i.eqtm(m2, m, a)])


@_schema("struct/term-trans", {"M": "term", "M'": "term", "M''": "term", "A": "term"},
         "element equality is transitive")
def _(i: Inst):
    m, m2, m3, a = i.term("M"), i.term("M'"), i.term("M''"), i.term("A")
    return RuleInstance(
        conclusion=i.eqtm(m, m3, a),
        premises=[i.eqtm(m, m2, a), i.eqtm(m2, m3, a)],
    )


@_schema("struct/conversion", {"kappa": "kappa", "M": "term", "M'": "term",
                               "A": "term", "A'": "term"},
         "equal elements of a type inhabit any equal type")
def _(i: Inst):
    k = i.kappa("kappa")
    m, m2, a, a2 = i.term("M"), i.term("M'"), i.term("A"), i.term("A'")
    return RuleInstance(
        conclusion=i.eqtm(m, m2, a2),
        premises=[i.eqtm(m, m2, a), i.eqtype(k, a, a2)],
    )


@_schema("struct/subst-type", {"kappa": "kappa", "a": "var", "A": "term",
                               "B": "term", "B'": "term", "N": "term", "N'": "term"},
         "substituting equal elements into an open type")
def _(i: Inst):
    k, a = i.kappa("kappa"), i.var("a")
    ty, b, b2 = i.term("A"), i.term("B"), i.term("B'")
    n, n2 = i.term("N"), i.term("N'")
    return RuleInstance(
        conclusion=i.eqtype(k, tsubst(b, n, a), tsubst(b2, n2, a)),
        premises=[
            i.eqtype(k, b, b2, hyps_extra=((a, ty),)),
            i.eqtm(n, n2, ty),
        ],
    )


@_schema("struct/subst-term", {"a": "var", "A": "term", "M": "term", "M'": "term",
                               "B": "term", "N": "term", "N'": "term"},
         "substituting equal elements into an open term")
def _(i: Inst):
    a = i.var("a")
    ty, m, m2, b = i.term("A"), i.term("M"), i.term("M'"), i.term("B")
    n, n2 = i.term("N"), i.term("N'")
    return RuleInstance(
        conclusion=i.eqtm(tsubst(m, n, a), tsubst(m2, n2, a), tsubst(b, n, a)),
        premises=[
            i.eqtm(m, m2, b, hyps_extra=((a, ty),)),
            i.eqtm(n, n2, ty),
        ],
    )


# ---------------------------------------------------------------------------
# Restriction rules


@_schema("restrict/empty", {"J": "judgment"},
         "an unrestricted judgment holds under the empty restriction")
def _(i: Inst):
    j = i.judgment("J")
    if j.xi:
        raise InstantiationError("the base judgment must be unrestricted")
    return RuleInstance(conclusion=j, premises=[j])


@_schema("restrict/eps-eq", {"J": "judgment", "eps": "eps"},
         "a reflexive endpoint equation may be added to a restriction")
def _(i: Inst):
    j, e = i.judgment("J"), i.eps("eps")
    return RuleInstance(conclusion=j.with_xi(j.xi + (Equation(e, e),)), premises=[j])


@_schema("restrict/eps-neq", {"J": "judgment", "eps": "eps"},
         "a judgment holds under a clashing endpoint equation")
def _(i: Inst):
    j, e = i.judgment("J"), i.eps("eps")
    return RuleInstance(
        conclusion=j.with_xi(j.xi + (Equation(e, dim_flip(e)),)), premises=[]
    )


@_schema("restrict/subst", {"J": "judgment", "x": "name", "r": "dim"},
         "a name equation is discharged by substituting it away")
def _(i: Inst):
    j, x, r = i.judgment("J"), i.name("x"), i.dim("r")
    if x not in j.psi:
        raise InstantiationError(f"{x} not in the judgment context")
    if isinstance(r, DimName) and r.name == x:
        raise InstantiationError("use the reflexive-equation rule for x=x")
    premise = judgment_dsubst(j, r, x)
    return RuleInstance(
        conclusion=j.with_xi(j.xi + (Equation(DimName(x), r),)), premises=[premise]
    )


# ---------------------------------------------------------------------------
# Computation rules


@_schema("comp/type", {"kappa": "kappa", "A": "term", "A'": "term", "B": "term"},
         "types compute: a stable step preserves type equality")
def _(i: Inst):
    k = i.kappa("kappa")
    a, a2, b = i.term("A"), i.term("A'"), i.term("B")
    return RuleInstance(
        conclusion=i.eqtype(k, a, b),
        premises=[i.eqtype(k, a2, b)],
        side_conditions=[
            SideCondition("step-stable", (a, a2), f"{pretty(a)} steps stably")
        ],
    )


@_schema("comp/term", {"M": "term", "M'": "term", "N": "term", "A": "term"},
         "terms compute: a stable step preserves element equality")
def _(i: Inst):
    m, m2, n, a = i.term("M"), i.term("M'"), i.term("N"), i.term("A")
    return RuleInstance(
        conclusion=i.eqtm(m, n, a),
        premises=[i.eqtm(m2, n, a)],
        side_conditions=[
            SideCondition("step-stable", (m, m2), f"{pretty(m)} steps stably")
        ],
    )


# ---------------------------------------------------------------------------
# Kan condition rules


@_schema("kan/shape-opposed", {"eqs": "eqs", "i": "index", "j": "index"},
         "a shape with two opposed tube equations is well-formed")
def _(i: Inst):
    eqs = i.eqs("eqs")
    a, b = i.index("i"), i.index("j")
    if a >= len(eqs) or b >= len(eqs):
        raise InstantiationError("witness index out of range")
    return RuleInstance(
        conclusion=i.wfshape(eqs),
        premises=[],
        side_conditions=[
            SideCondition("dim-eq", (eqs[a].lhs, eqs[b].lhs), "shared left side"),
            SideCondition("dim-eq", (eqs[a].rhs, DIM0), "first equation ends at 0"),
            SideCondition("dim-eq", (eqs[b].rhs, DIM1), "second equation ends at 1"),
        ],
    )


@_schema("kan/shape-refl", {"eqs": "eqs", "i": "index"},
         "a shape with a reflexive equation is well-formed")
def _(i: Inst):
    eqs = i.eqs("eqs")
    a = i.index("i")
    if a >= len(eqs):
        raise InstantiationError("witness index out of range")
    return RuleInstance(
        conclusion=i.wfshape(eqs),
        premises=[],
        side_conditions=[
            SideCondition("dim-eq", (eqs[a].lhs, eqs[a].rhs), "reflexive equation"),
        ],
    )


def _adjacency(i: Inst, y: str, eqs, left, right, ty_of):
    """The (forall i,j) tube-compatibility premises."""
    out = []
    for ii, ei in enumerate(eqs):
        for jj, ej in enumerate(eqs):
            out.append(
                i.eqtm(left[ii], right[jj], ty_of(ii), xi=(ei, ej), dims=(y,))
            )
    return out


def _cap_tubes(i: Inst, y: str, eqs, bodies, r: Dim, cap: Term, ty_at):
    return [
        i.eqtm(dsubst(bodies[ii], r, y), cap, ty_at(ii), xi=(eqs[ii],))
        for ii in range(len(eqs))
    ]


@_schema("kan/hcom", {"A": "term", "A'": "term", "r": "dim", "r'": "dim",
                      "M": "term", "M'": "term", "y": "name",
                      "eqs": "eqs", "N": "terms", "N'": "terms"},
         "homogeneous composites of equal inputs are equal")
def _(i: Inst):
    a, a2 = i.term("A"), i.term("A'")
    r, r2 = i.dim("r"), i.dim("r'")
    m, m2 = i.term("M"), i.term("M'")
    y, eqs = i.name("y"), i.eqs("eqs")
    n, n2 = i.terms("N"), i.terms("N'")
    lhs = S.Hcom(a, r, r2, m, _tubes(eqs, y, n))
    rhs = S.Hcom(a2, r, r2, m2, _tubes(eqs, y, n2))
    prem = [i.wfshape(eqs), i.eqtype(KAN, a, a2), i.eqtm(m, m2, a)]
    prem += _adjacency(i, y, eqs, n, n2, lambda _: a)
    prem += _cap_tubes(i, y, eqs, n, r, m, lambda _: a)
    return RuleInstance(conclusion=i.eqtm(lhs, rhs, a), premises=prem)


@_schema("kan/hcom-cap", {"A": "term", "r": "dim", "M": "term", "y": "name",
                          "eqs": "eqs", "N": "terms"},
         "a composite to the source dimension equals its cap")
def _(i: Inst):
    a, r, m = i.term("A"), i.dim("r"), i.term("M")
    y, eqs, n = i.name("y"), i.eqs("eqs"), i.terms("N")
    lhs = S.Hcom(a, r, r, m, _tubes(eqs, y, n))
    prem = [i.wfshape(eqs), i.wftype(KAN, a), i.oftype(m, a)]
    prem += _adjacency(i, y, eqs, n, n, lambda _: a)
    prem += _cap_tubes(i, y, eqs, n, r, m, lambda _: a)
    return RuleInstance(conclusion=i.eqtm(lhs, m, a), premises=prem)


@_schema("kan/hcom-tube", {"A": "term", "r": "dim", "r'": "dim", "M": "term",
                           "y": "name", "eqs": "eqs", "N": "terms", "i": "index"},
         "a composite with a true tube equation equals that tube's end")
def _(i: Inst):
    a, r, r2, m = i.term("A"), i.dim("r"), i.dim("r'"), i.term("M")
    y, eqs, n = i.name("y"), i.eqs("eqs"), i.terms("N")
    k = i.index("i")
    if k >= len(eqs):
        raise InstantiationError("tube index out of range")
    lhs = S.Hcom(a, r, r2, m, _tubes(eqs, y, n))
    prem = [i.wftype(KAN, a), i.oftype(m, a)]
    prem += _adjacency(i, y, eqs, n, n, lambda _: a)
    prem += _cap_tubes(i, y, eqs, n, r, m, lambda _: a)
    return RuleInstance(
        conclusion=i.eqtm(lhs, dsubst(n[k], r2, y), a),
        premises=prem,
        side_conditions=[
            SideCondition("dim-eq", (eqs[k].lhs, eqs[k].rhs), "selected tube is true")
        ],
    )


@_schema("kan/coe", {"x": "name", "A": "term", "A'": "term", "r": "dim",
                     "r'": "dim", "M": "term", "M'": "term"},
         "coercions of equal elements along equal type lines are equal")
def _(i: Inst):
    x = i.name("x")
    a, a2 = i.term("A"), i.term("A'")
    r, r2, m, m2 = i.dim("r"), i.dim("r'"), i.term("M"), i.term("M'")
    return RuleInstance(
        conclusion=i.eqtm(
            S.Coe(x, a, r, r2, m), S.Coe(x, a2, r, r2, m2), dsubst(a, r2, x)
        ),
        premises=[
            i.eqtype(KAN, a, a2, dims=(x,)),
            i.eqtm(m, m2, dsubst(a, r, x)),
        ],
    )


@_schema("kan/coe-cap", {"x": "name", "A": "term", "r": "dim", "M": "term"},
         "coercion to the source dimension is the identity")
def _(i: Inst):
    x, a, r, m = i.name("x"), i.term("A"), i.dim("r"), i.term("M")
    return RuleInstance(
        conclusion=i.eqtm(S.Coe(x, a, r, r, m), m, dsubst(a, r, x)),
        premises=[i.wftype(KAN, a, dims=(x,)), i.oftype(m, dsubst(a, r, x))],
    )


@_schema("kan/com", {"y": "name", "A": "term", "A'": "term", "r": "dim", "r'": "dim",
                     "M": "term", "M'": "term", "eqs": "eqs", "N": "terms", "N'": "terms"},
         "heterogeneous composites of equal inputs are equal")
def _(i: Inst):
    y = i.name("y")
    a, a2 = i.term("A"), i.term("A'")
    r, r2, m, m2 = i.dim("r"), i.dim("r'"), i.term("M"), i.term("M'")
    eqs, n, n2 = i.eqs("eqs"), i.terms("N"), i.terms("N'")
    lhs = S.Com(y, a, r, r2, m, _tubes(eqs, y, n))
    rhs = S.Com(y, a2, r, r2, m2, _tubes(eqs, y, n2))
    prem = [i.wfshape(eqs), i.eqtype(KAN, a, a2, dims=(y,)), i.eqtm(m, m2, dsubst(a, r, y))]
    prem += _adjacency(i, y, eqs, n, n2, lambda _: a)
    prem += _cap_tubes(i, y, eqs, n, r, m, lambda _: dsubst(a, r, y))
    return RuleInstance(conclusion=i.eqtm(lhs, rhs, dsubst(a, r2, y)), premises=prem)


@_schema("kan/com-cap", {"y": "name", "A": "term", "r": "dim", "M": "term",
                         "eqs": "eqs", "N": "terms"},
         "a heterogeneous composite to the source equals its cap")
def _(i: Inst):
    y, a = i.name("y"), i.term("A")
    r, m, eqs, n = i.dim("r"), i.term("M"), i.eqs("eqs"), i.terms("N")
    lhs = S.Com(y, a, r, r, m, _tubes(eqs, y, n))
    prem = [i.wfshape(eqs), i.wftype(KAN, a, dims=(y,)), i.oftype(m, dsubst(a, r, y))]
    prem += _adjacency(i, y, eqs, n, n, lambda _: a)
    prem += _cap_tubes(i, y, eqs, n, r, m, lambda _: dsubst(a, r, y))
    return RuleInstance(conclusion=i.eqtm(lhs, m, dsubst(a, r, y)), premises=prem)


@_schema("kan/com-tube", {"y": "name", "A": "term", "r": "dim", "r'": "dim",
                          "M": "term", "eqs": "eqs", "N": "terms", "i": "index"},
         "a heterogeneous composite with a true tube equals that tube's end")
def _(i: Inst):
    y, a = i.name("y"), i.term("A")
    r, r2, m = i.dim("r"), i.dim("r'"), i.term("M")
    eqs, n, k = i.eqs("eqs"), i.terms("N"), i.index("i")
    if k >= len(eqs):
        raise InstantiationError("tube index out of range")
    lhs = S.Com(y, a, r, r2, m, _tubes(eqs, y, n))
    prem = [i.wftype(KAN, a, dims=(y,)), i.oftype(m, dsubst(a, r, y))]
    prem += _adjacency(i, y, eqs, n, n, lambda _: a)
    prem += _cap_tubes(i, y, eqs, n, r, m, lambda _: dsubst(a, r, y))
    return RuleInstance(
        conclusion=i.eqtm(lhs, dsubst(n[k], r2, y), dsubst(a, r2, y)),
        premises=prem,
        side_conditions=[
            SideCondition("dim-eq", (eqs[k].lhs, eqs[k].rhs), "selected tube is true")
        ],
    )


# ---------------------------------------------------------------------------
# Dependent function types


@_schema("fun/form", {"kappa": "kappa", "a": "var", "A": "term", "A'": "term",
                      "B": "term", "B'": "term"},
         "function types respect equality of their parts")
def _(i: Inst):
    k, a = i.kappa("kappa"), i.var("a")
    dom, dom2, cod, cod2 = i.term("A"), i.term("A'"), i.term("B"), i.term("B'")
    return RuleInstance(
        conclusion=i.eqtype(k, S.Pi(a, dom, cod), S.Pi(a, dom2, cod2)),
        premises=[
            i.eqtype(k, dom, dom2),
            i.eqtype(k, cod, cod2, hyps_extra=((a, dom),)),
        ],
    )


@_schema("fun/intro", {"a": "var", "A": "term", "B": "term", "M": "term", "M'": "term"},
         "equal open bodies give equal functions")
def _(i: Inst):
    a, dom, cod = i.var("a"), i.term("A"), i.term("B")
    m, m2 = i.term("M"), i.term("M'")
    return RuleInstance(
        conclusion=i.eqtm(S.Lam(a, m), S.Lam(a, m2), S.Pi(a, dom, cod)),
        premises=[i.eqtm(m, m2, cod, hyps_extra=((a, dom),))],
    )


@_schema("fun/elim", {"a": "var", "A": "term", "B": "term", "M": "term",
                      "M'": "term", "N": "term", "N'": "term"},
         "applications of equal functions to equal arguments are equal")
def _(i: Inst):
    a, dom, cod = i.var("a"), i.term("A"), i.term("B")
    m, m2, n, n2 = i.term("M"), i.term("M'"), i.term("N"), i.term("N'")
    return RuleInstance(
        conclusion=i.eqtm(S.App(m, n), S.App(m2, n2), tsubst(cod, n, a)),
        premises=[i.eqtm(m, m2, S.Pi(a, dom, cod)), i.eqtm(n, n2, dom)],
    )


@_schema("fun/beta", {"a": "var", "A": "term", "B": "term", "M": "term", "N": "term"},
         "applying a function literal substitutes its argument")
def _(i: Inst):
    a, dom, cod = i.var("a"), i.term("A"), i.term("B")
    m, n = i.term("M"), i.term("N")
    return RuleInstance(
        conclusion=i.eqtm(
            S.App(S.Lam(a, m), n), tsubst(m, n, a), tsubst(cod, n, a)
        ),
        premises=[
            i.eqtm(m, m, cod, hyps_extra=((a, dom),)),
            i.oftype(n, dom),
        ],
    )


@_schema("fun/eta", {"a": "var", "A": "term", "B": "term", "M": "term"},
         "every function equals its expansion")
def _(i: Inst):
    a, dom, cod, m = i.var("a"), i.term("A"), i.term("B"), i.term("M")
    pi = S.Pi(a, dom, cod)
    return RuleInstance(
        conclusion=i.eqtm(m, S.Lam(a, S.App(m, S.Var(a))), pi),
        premises=[i.oftype(m, pi)],
    )


# ---------------------------------------------------------------------------
# Dependent pair types


@_schema("pair/form", {"kappa": "kappa", "a": "var", "A": "term", "A'": "term",
                       "B": "term", "B'": "term"},
         "pair types respect equality of their parts")
def _(i: Inst):
    k, a = i.kappa("kappa"), i.var("a")
    dom, dom2, cod, cod2 = i.term("A"), i.term("A'"), i.term("B"), i.term("B'")
    return RuleInstance(
        conclusion=i.eqtype(k, S.Sg(a, dom, cod), S.Sg(a, dom2, cod2)),
        premises=[
            i.eqtype(k, dom, dom2),
            i.eqtype(k, cod, cod2, hyps_extra=((a, dom),)),
        ],
    )


@_schema("pair/intro", {"a": "var", "A": "term", "B": "term", "M": "term",
                        "M'": "term", "N": "term", "N'": "term"},
         "pairs of equal components are equal")
def _(i: Inst):
    a, dom, cod = i.var("a"), i.term("A"), i.term("B")
    m, m2, n, n2 = i.term("M"), i.term("M'"), i.term("N"), i.term("N'")
    return RuleInstance(
        conclusion=i.eqtm(S.Pair(m, n), S.Pair(m2, n2), S.Sg(a, dom, cod)),
        premises=[i.eqtm(m, m2, dom), i.eqtm(n, n2, tsubst(cod, m, a))],
    )


@_schema("pair/fst", {"a": "var", "A": "term", "B": "term", "P": "term", "P'": "term"},
         "first projections of equal pairs are equal")
def _(i: Inst):
    a, dom, cod = i.var("a"), i.term("A"), i.term("B")
    p, p2 = i.term("P"), i.term("P'")
    return RuleInstance(
        conclusion=i.eqtm(S.Fst(p), S.Fst(p2), dom),
        premises=[i.eqtm(p, p2, S.Sg(a, dom, cod))],
    )


@_schema("pair/snd", {"a": "var", "A": "term", "B": "term", "P": "term", "P'": "term"},
         "second projections of equal pairs are equal")
def _(i: Inst):
    a, dom, cod = i.var("a"), i.term("A"), i.term("B")
    p, p2 = i.term("P"), i.term("P'")
    return RuleInstance(
        conclusion=i.eqtm(S.Snd(p), S.Snd(p2), tsubst(cod, S.Fst(p), a)),
        premises=[i.eqtm(p, p2, S.Sg(a, dom, cod))],
    )


@_schema("pair/fst-beta", {"M": "term", "N": "term", "A": "term"},
         "first projection of a literal pair")
def _(i: Inst):
    m, n, ty = i.term("M"), i.term("N"), i.term("A")
    return RuleInstance(
        conclusion=i.eqtm(S.Fst(S.Pair(m, n)), m, ty),
        premises=[i.oftype(m, ty)],
    )


@_schema("pair/snd-beta", {"M": "term", "N": "term", "B": "term"},
         "second projection of a literal pair")
def _(i: Inst):
    m, n, ty = i.term("M"), i.term("N"), i.term("B")
    return RuleInstance(
        conclusion=i.eqtm(S.Snd(S.Pair(m, n)), n, ty),
        premises=[i.oftype(n, ty)],
    )


@_schema("pair/eta", {"a": "var", "A": "term", "B": "term", "P": "term"},
         "every pair equals its expansion")
def _(i: Inst):
    a, dom, cod, p = i.var("a"), i.term("A"), i.term("B"), i.term("P")
    sg = S.Sg(a, dom, cod)
    return RuleInstance(
        conclusion=i.eqtm(p, S.Pair(S.Fst(p), S.Snd(p)), sg),
        premises=[i.oftype(p, sg)],
    )


# ---------------------------------------------------------------------------
# Path types


@_schema("path/form", {"kappa": "kappa", "x": "name", "A": "term", "A'": "term",
                       "P0": "term", "P0'": "term", "P1": "term", "P1'": "term"},
         "path types respect equality of their parts")
def _(i: Inst):
    k, x = i.kappa("kappa"), i.name("x")
    a, a2 = i.term("A"), i.term("A'")
    p0, p02, p1, p12 = i.term("P0"), i.term("P0'"), i.term("P1"), i.term("P1'")
    prem = [i.eqtype(k, a, a2, dims=(x,))]
    for eps, pe, pe2 in ((DIM0, p0, p02), (DIM1, p1, p12)):
        prem.append(i.eqtm(pe, pe2, dsubst(a, eps, x)))
    return RuleInstance(
        conclusion=i.eqtype(k, S.Path(x, a, p0, p1), S.Path(x, a2, p02, p12)),
        premises=prem,
    )


@_schema("path/intro", {"x": "name", "A": "term", "M": "term", "M'": "term",
                        "P0": "term", "P1": "term"},
         "equal lines with the stated endpoints give equal paths")
def _(i: Inst):
    x, a = i.name("x"), i.term("A")
    m, m2, p0, p1 = i.term("M"), i.term("M'"), i.term("P0"), i.term("P1")
    prem = [i.eqtm(m, m2, a, dims=(x,))]
    for eps, pe in ((DIM0, p0), (DIM1, p1)):
        prem.append(i.eqtm(dsubst(m, eps, x), pe, dsubst(a, eps, x)))
    return RuleInstance(
        conclusion=i.eqtm(S.DLam(x, m), S.DLam(x, m2), S.Path(x, a, p0, p1)),
        premises=prem,
    )


@_schema("path/elim", {"x": "name", "A": "term", "M": "term", "M'": "term",
                       "P0": "term", "P1": "term", "r": "dim"},
         "equal paths applied at a dimension are equal")
def _(i: Inst):
    x, a, r = i.name("x"), i.term("A"), i.dim("r")
    m, m2, p0, p1 = i.term("M"), i.term("M'"), i.term("P0"), i.term("P1")
    return RuleInstance(
        conclusion=i.eqtm(S.DApp(m, r), S.DApp(m2, r), dsubst(a, r, x)),
        premises=[i.eqtm(m, m2, S.Path(x, a, p0, p1))],
    )


@_schema("path/eps", {"x": "name", "A": "term", "M": "term",
                      "P0": "term", "P1": "term", "eps": "eps"},
         "a path applied at an endpoint is that endpoint")
def _(i: Inst):
    x, a, e = i.name("x"), i.term("A"), i.eps("eps")
    m, p0, p1 = i.term("M"), i.term("P0"), i.term("P1")
    pe = p0 if e == DIM0 else p1
    return RuleInstance(
        conclusion=i.eqtm(S.DApp(m, e), pe, dsubst(a, e, x)),
        premises=[i.oftype(m, S.Path(x, a, p0, p1))],
    )


@_schema("path/beta", {"x": "name", "A": "term", "M": "term", "r": "dim"},
         "applying a path literal substitutes the dimension")
def _(i: Inst):
    x, a, m, r = i.name("x"), i.term("A"), i.term("M"), i.dim("r")
    return RuleInstance(
        conclusion=i.eqtm(S.DApp(S.DLam(x, m), r), dsubst(m, r, x), dsubst(a, r, x)),
        premises=[i.eqtm(m, m, a, dims=(x,))],
    )


@_schema("path/eta", {"x": "name", "A": "term", "M": "term", "P0": "term", "P1": "term"},
         "every path equals its expansion")
def _(i: Inst):
    x, a, m = i.name("x"), i.term("A"), i.term("M")
    p0, p1 = i.term("P0"), i.term("P1")
    ty = S.Path(x, a, p0, p1)
    return RuleInstance(
        conclusion=i.eqtm(m, S.DLam(x, S.DApp(m, DimName(x))), ty),
        premises=[i.oftype(m, ty)],
    )


# ---------------------------------------------------------------------------
# Equality pretypes, void


@_schema("eq/form", {"A": "term", "A'": "term", "M": "term", "M'": "term",
                     "N": "term", "N'": "term"},
         "equality pretypes respect equality of their parts")
def _(i: Inst):
    a, a2 = i.term("A"), i.term("A'")
    m, m2, n, n2 = i.term("M"), i.term("M'"), i.term("N"), i.term("N'")
    return RuleInstance(
        conclusion=i.eqtype(PRE, S.Eq(a, m, n), S.Eq(a2, m2, n2)),
        premises=[i.eqtype(PRE, a, a2), i.eqtm(m, m2, a), i.eqtm(n, n2, a)],
    )


@_schema("eq/intro", {"A": "term", "M": "term", "N": "term"},
         "star witnesses any true equation")
def _(i: Inst):
    a, m, n = i.term("A"), i.term("M"), i.term("N")
    return RuleInstance(
        conclusion=i.oftype(S.STAR, S.Eq(a, m, n)),
        premises=[i.eqtm(m, n, a)],
    )


@_schema("eq/reflection", {"A": "term", "M": "term", "N": "term", "E": "term"},
         "an inhabitant of an equality pretype reflects the equation")
def _(i: Inst):
    a, m, n, e = i.term("A"), i.term("M"), i.term("N"), i.term("E")
    return RuleInstance(
        conclusion=i.eqtm(m, n, a),
        premises=[i.oftype(e, S.Eq(a, m, n))],
    )


@_schema("eq/eta", {"A": "term", "M": "term", "N": "term", "E": "term"},
         "every equality witness equals star")
def _(i: Inst):
    a, m, n, e = i.term("A"), i.term("M"), i.term("N"), i.term("E")
    ty = S.Eq(a, m, n)
    return RuleInstance(
        conclusion=i.eqtm(e, S.STAR, ty),
        premises=[i.oftype(e, ty)],
    )


@_schema("void/form", {}, "void is a Kan type")
def _(i: Inst):
    return RuleInstance(conclusion=i.wftype(KAN, S.VOID), premises=[])


@_schema("void/elim", {"M": "term", "J": "judgment"},
         "anything follows from an element of void")
def _(i: Inst):
    m, j = i.term("M"), i.judgment("J")
    return RuleInstance(
        conclusion=j,
        premises=[Judgment(j.psi, (), j.hyps, EqTm(m, m, S.VOID))],
    )


# ---------------------------------------------------------------------------
# Natural numbers


@_schema("nat/form", {}, "nat is a Kan type")
def _(i: Inst):
    return RuleInstance(conclusion=i.wftype(KAN, S.NAT), premises=[])


@_schema("nat/intro-zero", {}, "zero is a natural number")
def _(i: Inst):
    return RuleInstance(conclusion=i.oftype(S.ZERO, S.NAT), premises=[])


@_schema("nat/intro-suc", {"M": "term", "M'": "term"},
         "successors of equal numbers are equal")
def _(i: Inst):
    m, m2 = i.term("M"), i.term("M'")
    return RuleInstance(
        conclusion=i.eqtm(S.Suc(m), S.Suc(m2), S.NAT),
        premises=[i.eqtm(m, m2, S.NAT)],
    )


@_schema("nat/elim", {"kappa": "kappa", "n": "var", "a": "var", "A": "term",
                      "M": "term", "M'": "term", "Z": "term", "Z'": "term",
                      "St": "term", "St'": "term"},
         "recursors over equal data are equal")
def _(i: Inst):
    k, n, a = i.kappa("kappa"), i.var("n"), i.var("a")
    ty = i.term("A")
    m, m2 = i.term("M"), i.term("M'")
    z, z2 = i.term("Z"), i.term("Z'")
    s, s2 = i.term("St"), i.term("St'")
    return RuleInstance(
        conclusion=i.eqtm(
            S.NatRec(m, z, n, a, s), S.NatRec(m2, z2, n, a, s2), tsubst(ty, m, n)
        ),
        premises=[
            i.wftype(k, ty, hyps_extra=((n, S.NAT),)),
            i.eqtm(m, m2, S.NAT),
            i.eqtm(z, z2, tsubst(ty, S.ZERO, n)),
            i.eqtm(
                s, s2, tsubst(ty, S.Suc(S.Var(n)), n),
                hyps_extra=((n, S.NAT), (a, ty)),
            ),
        ],
    )


@_schema("nat/beta-zero", {"n": "var", "a": "var", "Z": "term", "St": "term", "A": "term"},
         "the recursor at zero returns the base case")
def _(i: Inst):
    n, a = i.var("n"), i.var("a")
    z, s, ty = i.term("Z"), i.term("St"), i.term("A")
    return RuleInstance(
        conclusion=i.eqtm(S.NatRec(S.ZERO, z, n, a, s), z, ty),
        premises=[i.oftype(z, ty)],
    )


@_schema("nat/beta-suc", {"kappa": "kappa", "n": "var", "a": "var", "A": "term",
                          "M": "term", "Z": "term", "St": "term"},
         "the recursor at a successor unfolds once")
def _(i: Inst):
    k, n, a = i.kappa("kappa"), i.var("n"), i.var("a")
    ty, m, z, s = i.term("A"), i.term("M"), i.term("Z"), i.term("St")
    unfold = tsubst(tsubst(s, m, n), S.NatRec(m, z, n, a, s), a)
    return RuleInstance(
        conclusion=i.eqtm(
            S.NatRec(S.Suc(m), z, n, a, s), unfold, tsubst(ty, S.Suc(m), n)
        ),
        premises=[
            i.wftype(k, ty, hyps_extra=((n, S.NAT),)),
            i.oftype(m, S.NAT),
            i.oftype(z, tsubst(ty, S.ZERO, n)),
            i.oftype(
                s, tsubst(ty, S.Suc(S.Var(n)), n), hyps_extra=((n, S.NAT), (a, ty))
            ),
        ],
    )


# ---------------------------------------------------------------------------
# Booleans and weak booleans


@_schema("bool/form-kan", {}, "bool is a Kan type")
def _(i: Inst):
    return RuleInstance(conclusion=i.wftype(KAN, S.BOOL), premises=[])


@_schema("bool/intro-true", {}, "true is a boolean")
def _(i: Inst):
    return RuleInstance(conclusion=i.oftype(S.TRUE, S.BOOL), premises=[])


@_schema("bool/intro-false", {}, "false is a boolean")
def _(i: Inst):
    return RuleInstance(conclusion=i.oftype(S.FALSE, S.BOOL), premises=[])


@_schema("bool/elim", {"b": "var", "A": "term", "A'": "term", "C": "term",
                       "M": "term", "M'": "term", "T": "term", "T'": "term",
                       "F": "term", "F'": "term"},
         "boolean case splits over equal data are equal; annotations are free")
def _(i: Inst):
    b = i.var("b")
    ann, ann2, c = i.term("A"), i.term("A'"), i.term("C")
    m, m2 = i.term("M"), i.term("M'")
    t, t2, f, f2 = i.term("T"), i.term("T'"), i.term("F"), i.term("F'")
    return RuleInstance(
        conclusion=i.eqtm(
            S.If(b, ann, m, t, f), S.If(b, ann2, m2, t2, f2), tsubst(c, m, b)
        ),
        premises=[
            i.wftype(PRE, c, hyps_extra=((b, S.BOOL),)),
            i.eqtm(m, m2, S.BOOL),
            i.eqtm(t, t2, tsubst(c, S.TRUE, b)),
            i.eqtm(f, f2, tsubst(c, S.FALSE, b)),
        ],
    )


@_schema("bool/beta-true", {"b": "var", "A": "term", "B": "term", "T": "term", "F": "term"},
         "case split at true returns the true branch")
def _(i: Inst):
    b, ann, ty = i.var("b"), i.term("A"), i.term("B")
    t, f = i.term("T"), i.term("F")
    return RuleInstance(
        conclusion=i.eqtm(S.If(b, ann, S.TRUE, t, f), t, ty),
        premises=[i.oftype(t, ty)],
    )


@_schema("bool/beta-false", {"b": "var", "A": "term", "B": "term", "T": "term", "F": "term"},
         "case split at false returns the false branch")
def _(i: Inst):
    b, ann, ty = i.var("b"), i.term("A"), i.term("B")
    t, f = i.term("T"), i.term("F")
    return RuleInstance(
        conclusion=i.eqtm(S.If(b, ann, S.FALSE, t, f), f, ty),
        premises=[i.oftype(f, ty)],
    )


@_schema("wbool/form-kan", {}, "wbool is a Kan type")
def _(i: Inst):
    return RuleInstance(conclusion=i.wftype(KAN, S.WBOOL), premises=[])


@_schema("wbool/from-bool", {"M": "term", "M'": "term"},
         "equal booleans are equal weak booleans")
def _(i: Inst):
    m, m2 = i.term("M"), i.term("M'")
    return RuleInstance(
        conclusion=i.eqtm(m, m2, S.WBOOL),
        premises=[i.eqtm(m, m2, S.BOOL)],
    )


@_schema("wbool/elim", {"b": "var", "A": "term", "A'": "term",
                        "M": "term", "M'": "term", "T": "term", "T'": "term",
                        "F": "term", "F'": "term"},
         "weak-boolean case splits require a Kan motive")
def _(i: Inst):
    b = i.var("b")
    ty, ty2 = i.term("A"), i.term("A'")
    m, m2 = i.term("M"), i.term("M'")
    t, t2, f, f2 = i.term("T"), i.term("T'"), i.term("F"), i.term("F'")
    return RuleInstance(
        conclusion=i.eqtm(
            S.If(b, ty, m, t, f), S.If(b, ty2, m2, t2, f2), tsubst(ty, m, b)
        ),
        premises=[
            i.eqtype(KAN, ty, ty2, hyps_extra=((b, S.WBOOL),)),
            i.eqtm(m, m2, S.WBOOL),
            i.eqtm(t, t2, tsubst(ty, S.TRUE, b)),
            i.eqtm(f, f2, tsubst(ty, S.FALSE, b)),
        ],
    )


# ---------------------------------------------------------------------------
# Circle


@_schema("circle/form-kan", {}, "the circle is a Kan type")
def _(i: Inst):
    return RuleInstance(conclusion=i.wftype(KAN, S.CIRCLE), premises=[])


@_schema("circle/intro-base", {}, "base is a point of the circle")
def _(i: Inst):
    return RuleInstance(conclusion=i.oftype(S.Base(), S.CIRCLE), premises=[])


@_schema("circle/intro-loop", {"r": "dim"}, "the loop at any dimension is a point")
def _(i: Inst):
    r = i.dim("r")
    return RuleInstance(conclusion=i.oftype(S.Loop(r), S.CIRCLE), premises=[])


@_schema("circle/loop-eps", {"eps": "eps"}, "the loop at an endpoint is base")
def _(i: Inst):
    e = i.eps("eps")
    return RuleInstance(conclusion=i.eqtm(S.Loop(e), S.Base(), S.CIRCLE), premises=[])


@_schema("circle/elim", {"c": "var", "A": "term", "A'": "term", "M": "term",
                         "M'": "term", "P": "term", "P'": "term", "x": "name",
                         "L": "term", "L'": "term"},
         "circle eliminations over equal data are equal")
def _(i: Inst):
    c, x = i.var("c"), i.name("x")
    ty, ty2 = i.term("A"), i.term("A'")
    m, m2 = i.term("M"), i.term("M'")
    p, p2, l, l2 = i.term("P"), i.term("P'"), i.term("L"), i.term("L'")
    prem = [
        i.eqtype(KAN, ty, ty2, hyps_extra=((c, S.CIRCLE),)),
        i.eqtm(m, m2, S.CIRCLE),
        i.eqtm(p, p2, tsubst(ty, S.Base(), c)),
        i.eqtm(l, l2, tsubst(ty, S.Loop(DimName(x)), c), dims=(x,)),
    ]
    for eps in (DIM0, DIM1):
        prem.append(i.eqtm(dsubst(l, eps, x), p, tsubst(ty, S.Base(), c)))
    return RuleInstance(
        conclusion=i.eqtm(
            S.CircElim(c, ty, m, p, x, l),
            S.CircElim(c, ty2, m2, p2, x, l2),
            tsubst(ty, m, c),
        ),
        premises=prem,
    )


@_schema("circle/beta-base", {"c": "var", "A": "term", "P": "term", "x": "name",
                              "L": "term", "B": "term"},
         "circle elimination at base returns the point case")
def _(i: Inst):
    c, x = i.var("c"), i.name("x")
    ann, p, l, ty = i.term("A"), i.term("P"), i.term("L"), i.term("B")
    return RuleInstance(
        conclusion=i.eqtm(S.CircElim(c, ann, S.Base(), p, x, l), p, ty),
        premises=[i.oftype(p, ty)],
    )


@_schema("circle/beta-loop", {"c": "var", "A": "term", "P": "term", "x": "name",
                              "L": "term", "B": "term", "r": "dim"},
         "circle elimination at a loop instantiates the loop case")
def _(i: Inst):
    c, x, r = i.var("c"), i.name("x"), i.dim("r")
    ann, p, l, ty = i.term("A"), i.term("P"), i.term("L"), i.term("B")
    prem = [i.eqtm(l, l, ty, dims=(x,))]
    for eps in (DIM0, DIM1):
        prem.append(i.eqtm(dsubst(l, eps, x), p, dsubst(ty, eps, x)))
    return RuleInstance(
        conclusion=i.eqtm(
            S.CircElim(c, ann, S.Loop(r), p, x, l), dsubst(l, r, x), dsubst(ty, r, x)
        ),
        premises=prem,
    )


# ---------------------------------------------------------------------------
# Univalence


@_schema("ua/form", {"kappa": "kappa", "r": "dim", "A": "term", "A'": "term",
                     "B": "term", "B'": "term", "E": "term", "E'": "term"},
         "V types respect equality of their parts, the left ones under r=0")
def _(i: Inst):
    k, r = i.kappa("kappa"), i.dim("r")
    a, a2, b, b2 = i.term("A"), i.term("A'"), i.term("B"), i.term("B'")
    e, e2 = i.term("E"), i.term("E'")
    r0 = (Equation(r, DIM0),)
    return RuleInstance(
        conclusion=i.eqtype(k, S.V(r, a, b, e), S.V(r, a2, b2, e2)),
        premises=[
            i.eqtype(k, a, a2, xi=r0),
            i.eqtype(k, b, b2),
            i.eqtm(e, e2, equiv_type(a, b), xi=r0),
        ],
    )


@_schema("ua/form-zero", {"kappa": "kappa", "A": "term", "B": "term", "E": "term"},
         "a V type at 0 is its left type")
def _(i: Inst):
    k = i.kappa("kappa")
    a, b, e = i.term("A"), i.term("B"), i.term("E")
    return RuleInstance(
        conclusion=i.eqtype(k, S.V(DIM0, a, b, e), a),
        premises=[i.wftype(k, a)],
    )


@_schema("ua/form-one", {"kappa": "kappa", "A": "term", "B": "term", "E": "term"},
         "a V type at 1 is its right type")
def _(i: Inst):
    k = i.kappa("kappa")
    a, b, e = i.term("A"), i.term("B"), i.term("E")
    return RuleInstance(
        conclusion=i.eqtype(k, S.V(DIM1, a, b, e), b),
        premises=[i.wftype(k, b)],
    )


@_schema("ua/intro", {"r": "dim", "A": "term", "B": "term", "E": "term",
                      "M": "term", "M'": "term", "N": "term", "N'": "term"},
         "V elements pair a left element with a matching right element")
def _(i: Inst):
    r = i.dim("r")
    a, b, e = i.term("A"), i.term("B"), i.term("E")
    m, m2, n, n2 = i.term("M"), i.term("M'"), i.term("N"), i.term("N'")
    r0 = (Equation(r, DIM0),)
    return RuleInstance(
        conclusion=i.eqtm(S.Vin(r, m, n), S.Vin(r, m2, n2), S.V(r, a, b, e)),
        premises=[
            i.eqtm(m, m2, a, xi=r0),
            i.eqtm(n, n2, b),
            i.oftype(e, equiv_type(a, b), xi=r0),
            i.eqtm(S.App(S.Fst(e), m), n, b, xi=r0),
        ],
    )


@_schema("ua/intro-zero", {"M": "term", "N": "term", "A": "term"},
         "a V element at 0 is its left component")
def _(i: Inst):
    m, n, a = i.term("M"), i.term("N"), i.term("A")
    return RuleInstance(
        conclusion=i.eqtm(S.Vin(DIM0, m, n), m, a),
        premises=[i.oftype(m, a)],
    )


@_schema("ua/intro-one", {"M": "term", "N": "term", "B": "term"},
         "a V element at 1 is its right component")
def _(i: Inst):
    m, n, b = i.term("M"), i.term("N"), i.term("B")
    return RuleInstance(
        conclusion=i.eqtm(S.Vin(DIM1, m, n), n, b),
        premises=[i.oftype(n, b)],
    )


@_schema("ua/elim", {"r": "dim", "A": "term", "B": "term", "E": "term",
                     "M": "term", "M'": "term", "F": "term"},
         "projection out of a V type lands in the right type")
def _(i: Inst):
    r = i.dim("r")
    a, b, e = i.term("A"), i.term("B"), i.term("E")
    m, m2, f = i.term("M"), i.term("M'"), i.term("F")
    r0 = (Equation(r, DIM0),)
    return RuleInstance(
        conclusion=i.eqtm(S.Vproj(r, m, f), S.Vproj(r, m2, S.Fst(e)), b),
        premises=[
            i.eqtm(m, m2, S.V(r, a, b, e)),
            i.eqtm(f, S.Fst(e), S.arrow(a, b), xi=r0),
        ],
    )


@_schema("ua/elim-zero", {"A": "term", "B": "term", "M": "term", "F": "term"},
         "projection at 0 applies the equivalence map")
def _(i: Inst):
    a, b, m, f = i.term("A"), i.term("B"), i.term("M"), i.term("F")
    return RuleInstance(
        conclusion=i.eqtm(S.Vproj(DIM0, m, f), S.App(f, m), b),
        premises=[i.oftype(m, a), i.oftype(f, S.arrow(a, b))],
    )


@_schema("ua/elim-one", {"M": "term", "F": "term", "B": "term"},
         "projection at 1 is the identity")
def _(i: Inst):
    m, f, b = i.term("M"), i.term("F"), i.term("B")
    return RuleInstance(
        conclusion=i.eqtm(S.Vproj(DIM1, m, f), m, b),
        premises=[i.oftype(m, b)],
    )


@_schema("ua/beta", {"r": "dim", "A": "term", "B": "term", "M": "term",
                     "N": "term", "F": "term"},
         "projecting a V element returns its right component")
def _(i: Inst):
    r = i.dim("r")
    a, b = i.term("A"), i.term("B")
    m, n, f = i.term("M"), i.term("N"), i.term("F")
    r0 = (Equation(r, DIM0),)
    return RuleInstance(
        conclusion=i.eqtm(S.Vproj(r, S.Vin(r, m, n), f), n, b),
        premises=[
            i.oftype(m, a, xi=r0),
            i.oftype(n, b),
            i.oftype(f, S.arrow(a, b), xi=r0),
            i.eqtm(S.App(f, m), n, b, xi=r0),
        ],
    )


@_schema("ua/eta", {"r": "dim", "A": "term", "B": "term", "E": "term",
                    "M": "term", "N": "term"},
         "every V element equals its expansion")
def _(i: Inst):
    r = i.dim("r")
    a, b, e = i.term("A"), i.term("B"), i.term("E")
    m, n = i.term("M"), i.term("N")
    ty = S.V(r, a, b, e)
    return RuleInstance(
        conclusion=i.eqtm(S.Vin(r, m, S.Vproj(r, n, S.Fst(e))), n, ty),
        premises=[
            i.oftype(n, ty),
            i.eqtm(m, n, a, xi=(Equation(r, DIM0),)),
        ],
    )


# ---------------------------------------------------------------------------
# Universes


@_schema("univ/form-pre", {"j": "level"}, "each pretype universe is a pretype")
def _(i: Inst):
    return RuleInstance(conclusion=i.wftype(PRE, S.UPre(i.level("j"))), premises=[])


@_schema("univ/form-kan", {"j": "level"}, "each Kan universe is a Kan type")
def _(i: Inst):
    return RuleInstance(conclusion=i.wftype(KAN, S.UKan(i.level("j"))), premises=[])


def _univ(kappa: str, j: int) -> Term:
    return S.UKan(j) if kappa == KAN else S.UPre(j)


@_schema("univ/el", {"kappa": "kappa", "j": "level", "A": "term", "A'": "term"},
         "elements of a universe are types of its kind")
def _(i: Inst):
    k, j = i.kappa("kappa"), i.level("j")
    a, a2 = i.term("A"), i.term("A'")
    return RuleInstance(
        conclusion=i.eqtype(k, a, a2),
        premises=[i.eqtm(a, a2, _univ(k, j))],
    )


@_schema("univ/cumulativity", {"kappa": "kappa", "i": "level", "j": "level",
                               "A": "term", "A'": "term"},
         "universes are cumulative")
def _(i: Inst):
    k, lo, hi = i.kappa("kappa"), i.level("i"), i.level("j")
    a, a2 = i.term("A"), i.term("A'")
    return RuleInstance(
        conclusion=i.eqtm(a, a2, _univ(k, hi)),
        premises=[i.eqtm(a, a2, _univ(k, lo))],
        side_conditions=[SideCondition("level-le", (lo, hi), "level inclusion")],
    )


@_schema("univ/kan-pre", {"j": "level", "A": "term", "A'": "term"},
         "Kan universe elements are pretype universe elements")
def _(i: Inst):
    j = i.level("j")
    a, a2 = i.term("A"), i.term("A'")
    return RuleInstance(
        conclusion=i.eqtm(a, a2, S.UPre(j)),
        premises=[i.eqtm(a, a2, S.UKan(j))],
    )


@_schema("univ/pi", {"kappa": "kappa", "j": "level", "a": "var", "A": "term",
                     "A'": "term", "B": "term", "B'": "term"},
         "universes are closed under function types")
def _(i: Inst):
    k, j, a = i.kappa("kappa"), i.level("j"), i.var("a")
    dom, dom2, cod, cod2 = i.term("A"), i.term("A'"), i.term("B"), i.term("B'")
    u = _univ(k, j)
    return RuleInstance(
        conclusion=i.eqtm(S.Pi(a, dom, cod), S.Pi(a, dom2, cod2), u),
        premises=[
            i.eqtm(dom, dom2, u),
            i.eqtm(cod, cod2, u, hyps_extra=((a, dom),)),
        ],
    )


@_schema("univ/sigma", {"kappa": "kappa", "j": "level", "a": "var", "A": "term",
                        "A'": "term", "B": "term", "B'": "term"},
         "universes are closed under pair types")
def _(i: Inst):
    k, j, a = i.kappa("kappa"), i.level("j"), i.var("a")
    dom, dom2, cod, cod2 = i.term("A"), i.term("A'"), i.term("B"), i.term("B'")
    u = _univ(k, j)
    return RuleInstance(
        conclusion=i.eqtm(S.Sg(a, dom, cod), S.Sg(a, dom2, cod2), u),
        premises=[
            i.eqtm(dom, dom2, u),
            i.eqtm(cod, cod2, u, hyps_extra=((a, dom),)),
        ],
    )


@_schema("univ/path", {"kappa": "kappa", "j": "level", "x": "name", "A": "term",
                       "A'": "term", "P0": "term", "P0'": "term",
                       "P1": "term", "P1'": "term"},
         "universes are closed under path types")
def _(i: Inst):
    k, j, x = i.kappa("kappa"), i.level("j"), i.name("x")
    a, a2 = i.term("A"), i.term("A'")
    p0, p02, p1, p12 = i.term("P0"), i.term("P0'"), i.term("P1"), i.term("P1'")
    u = _univ(k, j)
    prem = [i.eqtm(a, a2, u, dims=(x,))]
    for eps, pe, pe2 in ((DIM0, p0, p02), (DIM1, p1, p12)):
        prem.append(i.eqtm(pe, pe2, dsubst(a, eps, x)))
    return RuleInstance(
        conclusion=i.eqtm(S.Path(x, a, p0, p1), S.Path(x, a2, p02, p12), u),
        premises=prem,
    )


@_schema("univ/eq", {"j": "level", "A": "term", "A'": "term", "M": "term",
                     "M'": "term", "N": "term", "N'": "term"},
         "pretype universes are closed under equality pretypes")
def _(i: Inst):
    j = i.level("j")
    a, a2 = i.term("A"), i.term("A'")
    m, m2, n, n2 = i.term("M"), i.term("M'"), i.term("N"), i.term("N'")
    return RuleInstance(
        conclusion=i.eqtm(S.Eq(a, m, n), S.Eq(a2, m2, n2), S.UPre(j)),
        premises=[
            i.eqtm(a, a2, S.UPre(j)),
            i.eqtm(m, m2, a),
            i.eqtm(n, n2, a),
        ],
    )


def _univ_base(rid: str, ty: Term, what: str):
    @_schema(rid, {"kappa": "kappa", "j": "level"}, f"{what} lives in every universe")
    def _(i: Inst):
        return RuleInstance(
            conclusion=i.oftype(ty, _univ(i.kappa("kappa"), i.level("j"))),
            premises=[],
        )


_univ_base("univ/void", S.VOID, "void")
_univ_base("univ/nat", S.NAT, "nat")
_univ_base("univ/bool", S.BOOL, "bool")
_univ_base("univ/wbool", S.WBOOL, "wbool")
_univ_base("univ/circle", S.CIRCLE, "the circle")


@_schema("univ/ua", {"kappa": "kappa", "j": "level", "r": "dim", "A": "term",
                     "A'": "term", "B": "term", "B'": "term", "E": "term", "E'": "term"},
         "universes are closed under V types")
def _(i: Inst):
    k, j, r = i.kappa("kappa"), i.level("j"), i.dim("r")
    a, a2, b, b2 = i.term("A"), i.term("A'"), i.term("B"), i.term("B'")
    e, e2 = i.term("E"), i.term("E'")
    u = _univ(k, j)
    r0 = (Equation(r, DIM0),)
    return RuleInstance(
        conclusion=i.eqtm(S.V(r, a, b, e), S.V(r, a2, b2, e2), u),
        premises=[
            i.eqtm(a, a2, u, xi=r0),
            i.eqtm(b, b2, u),
            i.eqtm(e, e2, equiv_type(a, b), xi=r0),
        ],
    )


@_schema("univ/in-pre", {"kappa": "kappa", "i": "level", "j": "level"},
         "every universe is an element of larger pretype universes")
def _(i: Inst):
    k, lo, hi = i.kappa("kappa"), i.level("i"), i.level("j")
    return RuleInstance(
        conclusion=i.oftype(_univ(k, lo), S.UPre(hi)),
        premises=[],
        side_conditions=[SideCondition("level-lt", (lo, hi), "strict level increase")],
    )


@_schema("univ/kan-in-kan", {"i": "level", "j": "level"},
         "Kan universes are elements of larger Kan universes")
def _(i: Inst):
    lo, hi = i.level("i"), i.level("j")
    return RuleInstance(
        conclusion=i.oftype(S.UKan(lo), S.UKan(hi)),
        premises=[],
        side_conditions=[SideCondition("level-lt", (lo, hi), "strict level increase")],
    )


def _box_premises(i: Inst, y, eqs, a, bs, extra_adjacent=None):
    """Type-line premises shared by the box and cap rules."""
    prem = []
    other = extra_adjacent if extra_adjacent is not None else bs
    for ii, ei in enumerate(eqs):
        for jj, ej in enumerate(eqs):
            prem.append(
                i.eqtype(KAN, bs[ii], other[jj], xi=(ei, ej), dims=(y,))
            )
    for ii, ei in enumerate(eqs):
        prem.append(
            i.eqtype(KAN, dsubst(bs[ii], i.dim("r"), y), a, xi=(ei,))
        )
    return prem


@_schema("univ/box", {"j": "level", "r": "dim", "r'": "dim", "A": "term",
                      "M": "term", "M'": "term", "y": "name", "eqs": "eqs",
                      "B": "terms", "N": "terms", "N'": "terms"},
         "boxes of equal caps and faces are equal composites")
def _(i: Inst):
    j, r, r2 = i.level("j"), i.dim("r"), i.dim("r'")
    a, m, m2 = i.term("A"), i.term("M"), i.term("M'")
    y, eqs = i.name("y"), i.eqs("eqs")
    bs, n, n2 = i.terms("B"), i.terms("N"), i.terms("N'")
    ty = S.Hcom(S.UKan(j), r, r2, a, _tubes(eqs, y, bs))
    prem = [i.wfshape(eqs), i.wftype(KAN, a), i.eqtm(m, m2, a)]
    prem += _box_premises(i, y, eqs, a, bs)
    for ii, ei in enumerate(eqs):
        for jj, ej in enumerate(eqs):
            prem.append(
                i.eqtm(n[ii], n2[jj], dsubst(bs[ii], r2, y), xi=(ei, ej))
            )
    for ii, ei in enumerate(eqs):
        prem.append(
            i.eqtm(S.Coe(y, bs[ii], r2, r, n[ii]), m, a, xi=(ei,))
        )
    return RuleInstance(
        conclusion=i.eqtm(
            S.Box(r, r2, m, _faces(eqs, n)), S.Box(r, r2, m2, _faces(eqs, n2)), ty
        ),
        premises=prem,
    )


@_schema("univ/box-cap-eq", {"r": "dim", "M": "term", "A": "term",
                             "eqs": "eqs", "N": "terms"},
         "a box with equal endpoints is its cap")
def _(i: Inst):
    r, m, a = i.dim("r"), i.term("M"), i.term("A")
    eqs, n = i.eqs("eqs"), i.terms("N")
    return RuleInstance(
        conclusion=i.eqtm(S.Box(r, r, m, _faces(eqs, n)), m, a),
        premises=[i.oftype(m, a)],
    )


@_schema("univ/box-tube", {"r": "dim", "r'": "dim", "A": "term", "M": "term",
                           "y": "name", "eqs": "eqs", "B": "terms", "N": "terms",
                           "i": "index"},
         "a box with a true face equation is that face")
def _(i: Inst):
    r, r2, a, m = i.dim("r"), i.dim("r'"), i.term("A"), i.term("M")
    y, eqs, bs, n = i.name("y"), i.eqs("eqs"), i.terms("B"), i.terms("N")
    k = i.index("i")
    if k >= len(eqs):
        raise InstantiationError("face index out of range")
    prem = [i.wftype(KAN, a), i.oftype(m, a)]
    prem += _box_premises(i, y, eqs, a, bs)
    for ii, ei in enumerate(eqs):
        for jj, ej in enumerate(eqs):
            prem.append(i.eqtm(n[ii], n[jj], dsubst(bs[ii], r2, y), xi=(ei, ej)))
    for ii, ei in enumerate(eqs):
        prem.append(i.eqtm(S.Coe(y, bs[ii], r2, r, n[ii]), m, a, xi=(ei,)))
    return RuleInstance(
        conclusion=i.eqtm(S.Box(r, r2, m, _faces(eqs, n)), n[k], dsubst(bs[k], r2, y)),
        premises=prem,
        side_conditions=[
            SideCondition("dim-eq", (eqs[k].lhs, eqs[k].rhs), "selected face is true")
        ],
    )


@_schema("univ/cap", {"j": "level", "r": "dim", "r'": "dim", "A": "term",
                      "M": "term", "M'": "term", "y": "name", "eqs": "eqs",
                      "B": "terms", "B'": "terms"},
         "caps of equal boxes along equal type lines are equal")
def _(i: Inst):
    j, r, r2 = i.level("j"), i.dim("r"), i.dim("r'")
    a, m, m2 = i.term("A"), i.term("M"), i.term("M'")
    y, eqs = i.name("y"), i.eqs("eqs")
    bs, bs2 = i.terms("B"), i.terms("B'")
    ty = S.Hcom(S.UKan(j), r, r2, a, _tubes(eqs, y, bs))
    prem = [i.wfshape(eqs), i.wftype(KAN, a)]
    prem += _box_premises(i, y, eqs, a, bs, extra_adjacent=bs2)
    prem.append(i.eqtm(m, m2, ty))
    return RuleInstance(
        conclusion=i.eqtm(
            S.Cap(r, r2, m, _tubes(eqs, y, bs)),
            S.Cap(r, r2, m2, _tubes(eqs, y, bs2)),
            a,
        ),
        premises=prem,
    )


@_schema("univ/cap-eq", {"r": "dim", "M": "term", "A": "term", "y": "name",
                         "eqs": "eqs", "B": "terms"},
         "a cap with equal endpoints is its argument")
def _(i: Inst):
    r, m, a = i.dim("r"), i.term("M"), i.term("A")
    y, eqs, bs = i.name("y"), i.eqs("eqs"), i.terms("B")
    return RuleInstance(
        conclusion=i.eqtm(S.Cap(r, r, m, _tubes(eqs, y, bs)), m, a),
        premises=[i.oftype(m, a)],
    )


@_schema("univ/cap-tube", {"j": "level", "r": "dim", "r'": "dim", "A": "term",
                           "M": "term", "M'": "term", "y": "name", "eqs": "eqs",
                           "B": "terms", "B'": "terms", "i": "index"},
         "a cap with a true tube equation coerces backwards")
def _(i: Inst):
    j, r, r2 = i.level("j"), i.dim("r"), i.dim("r'")
    a, m, m2 = i.term("A"), i.term("M"), i.term("M'")
    y, eqs = i.name("y"), i.eqs("eqs")
    bs, bs2 = i.terms("B"), i.terms("B'")
    k = i.index("i")
    if k >= len(eqs):
        raise InstantiationError("tube index out of range")
    ty = S.Hcom(S.UKan(j), r, r2, a, _tubes(eqs, y, bs))
    prem = [i.wftype(KAN, a)]
    prem += _box_premises(i, y, eqs, a, bs, extra_adjacent=bs2)
    prem.append(i.eqtm(m, m2, ty))
    return RuleInstance(
        conclusion=i.eqtm(
            S.Cap(r, r2, m, _tubes(eqs, y, bs)), S.Coe(y, bs[k], r2, r, m), a
        ),
        premises=prem,
        side_conditions=[
            SideCondition("dim-eq", (eqs[k].lhs, eqs[k].rhs), "selected tube is true")
        ],
    )


@_schema("univ/cap-box", {"r": "dim", "r'": "dim", "A": "term", "M": "term",
                          "M'": "term", "y": "name", "eqs": "eqs", "B": "terms",
                          "N": "terms", "N'": "terms"},
         "capping a box recovers its cap")
def _(i: Inst):
    r, r2, a = i.dim("r"), i.dim("r'"), i.term("A")
    m, m2 = i.term("M"), i.term("M'")
    y, eqs = i.name("y"), i.eqs("eqs")
    bs, n, n2 = i.terms("B"), i.terms("N"), i.terms("N'")
    prem = [i.wfshape(eqs), i.wftype(KAN, a), i.eqtm(m, m2, a)]
    prem += _box_premises(i, y, eqs, a, bs)
    for ii, ei in enumerate(eqs):
        for jj, ej in enumerate(eqs):
            prem.append(i.eqtm(n[ii], n2[jj], dsubst(bs[ii], r2, y), xi=(ei, ej)))
    for ii, ei in enumerate(eqs):
        prem.append(i.eqtm(S.Coe(y, bs[ii], r2, r, n[ii]), m, a, xi=(ei,)))
    return RuleInstance(
        conclusion=i.eqtm(
            S.Cap(r, r2, S.Box(r, r2, m, _faces(eqs, n)), _tubes(eqs, y, bs)), m, a
        ),
        premises=prem,
    )


@_schema("univ/box-cap", {"j": "level", "r": "dim", "r'": "dim", "A": "term",
                          "M": "term", "y": "name", "eqs": "eqs", "B": "terms"},
         "boxing a cap recovers the original composite element")
def _(i: Inst):
    j, r, r2 = i.level("j"), i.dim("r"), i.dim("r'")
    a, m = i.term("A"), i.term("M")
    y, eqs, bs = i.name("y"), i.eqs("eqs"), i.terms("B")
    ty = S.Hcom(S.UKan(j), r, r2, a, _tubes(eqs, y, bs))
    prem = [i.wfshape(eqs), i.wftype(KAN, a)]
    prem += _box_premises(i, y, eqs, a, bs)
    prem.append(i.oftype(m, ty))
    faces = tuple(Face(e, m) for e in eqs)
    return RuleInstance(
        conclusion=i.eqtm(
            S.Box(r, r2, S.Cap(r, r2, m, _tubes(eqs, y, bs)), faces), m, ty
        ),
        premises=prem,
    )


# ---------------------------------------------------------------------------
# Derivations


@dataclass(frozen=True)
class Derivation:
    rule: str
    conclusion: Judgment
    inst: dict
    children: tuple = ()


@dataclass(frozen=True)
class CheckReport:
    ok: bool
    path: tuple = ()
    reason: str = ""

    def to_json(self):
        if self.ok:
            return {"ok": True}
        return {"ok": False, "path": list(self.path), "reason": self.reason}


ASSUME = "assume"  # leaf-oracle rule id, accepted only on request


def check_derivation(d: Derivation, assume_leaves: bool = False) -> CheckReport:
    """Verify that every node is a correct instance of its rule.

    With ``assume_leaves`` the pseudo-rule ``assume`` is accepted at any
    leaf, taking its claimed conclusion on faith; this is the test-mode
    oracle used to exercise rule instantiation in isolation.
    """
    return _check(d, (), assume_leaves)


def _check(d: Derivation, path: tuple, assume_leaves: bool = False) -> CheckReport:
    if assume_leaves and d.rule == ASSUME:
        if d.children:
            return CheckReport(False, path, "assumed leaves take no children")
        return CheckReport(True)
    if d.rule not in RULES:
        return CheckReport(False, path, f"unknown rule {d.rule!r}")
    try:
        inst = RULES[d.rule].instantiate(d.inst)
    except (InstantiationError, ScopeError, CheckerError) as e:
        return CheckReport(False, path, f"instantiation failed: {e}")
    try:
        if not judgment_matches(d.conclusion, inst.conclusion):
            return CheckReport(
                False,
                path,
                "conclusion mismatch: rule derives "
                f"[{inst.conclusion}], node claims [{d.conclusion}]",
            )
    except ScopeError as e:
        return CheckReport(False, path, f"ill-scoped conclusion: {e}")
    if len(d.children) != len(inst.premises):
        return CheckReport(
            False,
            path,
            f"rule needs {len(inst.premises)} premises, node has {len(d.children)}",
        )
    for k, (child, prem) in enumerate(zip(d.children, inst.premises)):
        sub = _check(child, path + (k,), assume_leaves)
        if not sub.ok:
            return sub
        try:
            if not judgment_matches(prem, child.conclusion):
                return CheckReport(
                    False,
                    path + (k,),
                    f"premise mismatch: rule needs [{prem}], child proves "
                    f"[{child.conclusion}]",
                )
        except ScopeError as e:
            return CheckReport(False, path + (k,), f"ill-scoped premise: {e}")
    for sc in inst.side_conditions:
        err = sc.check()
        if err is not None:
            return CheckReport(False, path, f"side condition failed: {err}")
    return CheckReport(True)


# ---------------------------------------------------------------------------
# JSON serialization


def form_to_json(form: Form):
    match form:
        case EqType(kappa, lhs, rhs):
            return {
                "judg": "eqtype", "kappa": kappa,
                "lhs": term_to_json(lhs), "rhs": term_to_json(rhs),
            }
        case EqTm(lhs, rhs, ty):
            return {
                "judg": "eqtm", "lhs": term_to_json(lhs),
                "rhs": term_to_json(rhs), "ty": term_to_json(ty),
            }
        case WfShape(eqs):
            return {"judg": "wfshape", "eqs": [eq_to_json(e) for e in eqs]}
    raise TypeError(form)


def form_from_json(obj) -> Form:
    match obj.get("judg"):
        case "eqtype":
            return EqType(obj["kappa"], term_from_json(obj["lhs"]), term_from_json(obj["rhs"]))
        case "eqtm":
            return EqTm(
                term_from_json(obj["lhs"]), term_from_json(obj["rhs"]),
                term_from_json(obj["ty"]),
            )
        case "wfshape":
            return WfShape(tuple(eq_from_json(e) for e in obj["eqs"]))
    raise ValueError(f"bad judgment form: {obj!r}")


def judgment_to_json(j: Judgment):
    return {
        "psi": sorted(j.psi),
        "xi": [eq_to_json(e) for e in j.xi],
        "hyps": [[a, term_to_json(t)] for a, t in j.hyps],
        "form": form_to_json(j.form),
    }


def judgment_from_json(obj) -> Judgment:
    return Judgment(
        frozenset(obj.get("psi", [])),
        tuple(eq_from_json(e) for e in obj.get("xi", [])),
        tuple((a, term_from_json(t)) for a, t in obj.get("hyps", [])),
        form_from_json(obj["form"]),
    )


def _value_to_json(v):
    if isinstance(v, Term):
        return {"sort": "term", "value": term_to_json(v)}
    if isinstance(v, Dim):
        return {"sort": "dim", "value": dim_to_json(v)}
    if isinstance(v, Equation):
        return {"sort": "eq", "value": eq_to_json(v)}
    if isinstance(v, Judgment):
        return {"sort": "judgment", "value": judgment_to_json(v)}
    if isinstance(v, DimSubst):
        return {
            "sort": "dimsubst",
            "value": {
                "source": sorted(v.source),
                "target": sorted(v.target),
                "map": {x: dim_to_json(d) for x, d in v.map.items()},
            },
        }
    if isinstance(v, bool):
        raise CheckerError("boolean instantiation values are not supported")
    if isinstance(v, int):
        return {"sort": "int", "value": v}
    if isinstance(v, str):
        return {"sort": "str", "value": v}
    if isinstance(v, (list, tuple)):
        if all(isinstance(t, Term) for t in v):
            return {"sort": "terms", "value": [term_to_json(t) for t in v]}
        if all(isinstance(e, Equation) for e in v):
            return {"sort": "eqs", "value": [eq_to_json(e) for e in v]}
        if all(isinstance(h, tuple) and len(h) == 2 for h in v):
            return {"sort": "hyps", "value": [[a, term_to_json(t)] for a, t in v]}
        if all(isinstance(s, str) for s in v):
            return {"sort": "names", "value": list(v)}
        if not v:
            return {"sort": "eqs", "value": []}
    raise CheckerError(f"cannot serialize instantiation value {v!r}")


def _value_from_json(obj):
    sort, val = obj["sort"], obj["value"]
    if sort == "term":
        return term_from_json(val)
    if sort == "dim":
        return dim_from_json(val)
    if sort == "eq":
        return eq_from_json(val)
    if sort == "judgment":
        return judgment_from_json(val)
    if sort == "dimsubst":
        return DimSubst(
            frozenset(val["source"]),
            frozenset(val["target"]),
            {x: dim_from_json(d) for x, d in val["map"].items()},
        )
    if sort in ("int", "str"):
        return val
    if sort == "terms":
        return tuple(term_from_json(t) for t in val)
    if sort == "eqs":
        return tuple(eq_from_json(e) for e in val)
    if sort == "hyps":
        return tuple((a, term_from_json(t)) for a, t in val)
    if sort == "names":
        return tuple(val)
    raise ValueError(f"unknown instantiation sort {sort!r}")


def derivation_to_json(d: Derivation):
    return {
        "rule": d.rule,
        "conclusion": judgment_to_json(d.conclusion),
        "inst": {k: _value_to_json(v) for k, v in d.inst.items()},
        "children": [derivation_to_json(c) for c in d.children],
    }


def derivation_from_json(obj) -> Derivation:
    return Derivation(
        rule=obj["rule"],
        conclusion=judgment_from_json(obj["conclusion"]),
        inst={k: _value_from_json(v) for k, v in obj.get("inst", {}).items()},
        children=tuple(derivation_from_json(c) for c in obj.get("children", [])),
    )
