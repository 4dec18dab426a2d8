"""Concrete syntax: a keyword-prefix reader and printer for terms.

The grammar is whitespace-insensitive and fully prefix, so no precedence
table is needed; compound arguments are parenthesized.  ``parse`` and
``pretty`` are mutually inverse up to alpha-renaming.
"""

from __future__ import annotations

import re

from .cube import DIM0, DIM1, Dim, DimConst, DimName, Equation
from . import syntax as S
from .syntax import Term


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


_TOKEN = re.compile(
    r"""(?P<ws>\s+)
      | (?P<arrow>~>)
      | (?P<num>\d+)
      | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
      | (?P<punct>[()\[\].:=*])
    """,
    re.VERBOSE,
)

KEYWORDS = {
    "lam", "app", "pair", "fst", "snd", "dlam", "dapp", "pi", "sg", "path",
    "eq", "void", "nat", "bool", "wbool", "S1", "zero", "suc", "natrec",
    "true", "false", "if", "base", "loop", "S1elim", "U", "pre", "kan",
    "V", "Vin", "Vproj", "coe", "hcom", "com", "fcom", "ghcom", "gcom",
    "box", "cap",
}

_NULLARY = {
    "void": S.VOID, "nat": S.NAT, "bool": S.BOOL, "wbool": S.WBOOL,
    "S1": S.CIRCLE, "zero": S.ZERO, "true": S.TRUE, "false": S.FALSE,
    "base": S.Base(), "*": S.STAR,
}


class _Lexer:
    def __init__(self, text: str):
        self.toks: list[tuple[str, str, int, int]] = []
        line, col, pos = 1, 1, 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m:
                raise ParseError(f"unexpected character {text[pos]!r}", line, col)
            kind = m.lastgroup
            val = m.group()
            if kind != "ws":
                self.toks.append((kind, val, line, col))
            nl = val.count("\n")
            if nl:
                line += nl
                col = len(val) - val.rfind("\n")
            else:
                col += len(val)
            pos = m.end()
        self.toks.append(("eof", "", line, col))
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def next(self):
        t = self.toks[self.i]
        if t[0] != "eof":
            self.i += 1
        return t


class _Parser:
    def __init__(self, text: str):
        self.lx = _Lexer(text)

    def fail(self, msg: str):
        kind, val, line, col = self.lx.peek()
        shown = val if val else "end of input"
        raise ParseError(f"{msg} (found {shown!r})", line, col)

    def eat(self, val: str):
        kind, got, line, col = self.lx.peek()
        if got != val:
            self.fail(f"expected {val!r}")
        self.lx.next()

    def ident(self) -> str:
        kind, val, line, col = self.lx.peek()
        if kind != "ident" or val in KEYWORDS:
            self.fail("expected an identifier")
        self.lx.next()
        return val

    def level(self) -> int:
        kind, val, _, _ = self.lx.peek()
        if kind != "num":
            self.fail("expected a universe level")
        self.lx.next()
        return int(val)

    def dim(self) -> Dim:
        kind, val, _, _ = self.lx.peek()
        if kind == "num" and val in ("0", "1"):
            self.lx.next()
            return DIM0 if val == "0" else DIM1
        if kind == "ident" and val not in KEYWORDS:
            self.lx.next()
            return DimName(val)
        self.fail("expected a dimension (0, 1, or a name)")

    def src_dst(self) -> tuple[Dim, Dim]:
        src = self.dim()
        self.eat("~>")
        return src, self.dim()

    def atom(self) -> Term:
        kind, val, _, _ = self.lx.peek()
        if val == "(":
            self.lx.next()
            t = self.expr()
            self.eat(")")
            return t
        if val in _NULLARY:
            self.lx.next()
            return _NULLARY[val]
        if kind == "ident" and val not in KEYWORDS:
            self.lx.next()
            return S.Var(val)
        self.fail("expected a term")

    def binder1(self) -> tuple[str, Term]:
        """( x . M )"""
        self.eat("(")
        x = self.ident()
        self.eat(".")
        body = self.expr()
        self.eat(")")
        return x, body

    def annot(self) -> tuple[str, Term]:
        """( a : A )"""
        self.eat("(")
        a = self.ident()
        self.eat(":")
        ty = self.expr()
        self.eat(")")
        return a, ty

    def tubes(self) -> tuple:
        out = []
        while self.lx.peek()[1] == "[":
            self.lx.next()
            lhs = self.dim()
            self.eat("=")
            rhs = self.dim()
            y = self.ident()
            self.eat(".")
            body = self.expr()
            self.eat("]")
            out.append(S.Tube(Equation(lhs, rhs), y, body))
        return tuple(out)

    def faces(self) -> tuple:
        out = []
        while self.lx.peek()[1] == "[":
            self.lx.next()
            lhs = self.dim()
            self.eat("=")
            rhs = self.dim()
            body = self.expr()
            self.eat("]")
            out.append(S.Face(Equation(lhs, rhs), body))
        return tuple(out)

    def expr(self) -> Term:
        kind, val, _, _ = self.lx.peek()
        if val == "lam":
            self.lx.next()
            a = self.ident()
            self.eat(".")
            return S.Lam(a, self.expr())
        if val == "dlam":
            self.lx.next()
            x = self.ident()
            self.eat(".")
            return S.DLam(x, self.expr())
        if val == "app":
            self.lx.next()
            return S.App(self.atom(), self.atom())
        if val == "pair":
            self.lx.next()
            return S.Pair(self.atom(), self.atom())
        if val == "fst":
            self.lx.next()
            return S.Fst(self.atom())
        if val == "snd":
            self.lx.next()
            return S.Snd(self.atom())
        if val == "dapp":
            self.lx.next()
            return S.DApp(self.atom(), self.dim())
        if val == "pi":
            self.lx.next()
            a, dom = self.annot()
            return S.Pi(a, dom, self.atom())
        if val == "sg":
            self.lx.next()
            a, dom = self.annot()
            return S.Sg(a, dom, self.atom())
        if val == "path":
            self.lx.next()
            x, ty = self.binder1()
            return S.Path(x, ty, self.atom(), self.atom())
        if val == "eq":
            self.lx.next()
            return S.Eq(self.atom(), self.atom(), self.atom())
        if val == "suc":
            self.lx.next()
            return S.Suc(self.atom())
        if val == "natrec":
            self.lx.next()
            scrut = self.atom()
            zcase = self.atom()
            self.eat("(")
            n = self.ident()
            a = self.ident()
            self.eat(".")
            scase = self.expr()
            self.eat(")")
            return S.NatRec(scrut, zcase, n, a, scase)
        if val == "if":
            self.lx.next()
            b, motive = self.binder1()
            return S.If(b, motive, self.atom(), self.atom(), self.atom())
        if val == "loop":
            self.lx.next()
            return S.Loop(self.dim())
        if val == "S1elim":
            self.lx.next()
            c, motive = self.binder1()
            scrut = self.atom()
            base_case = self.atom()
            x, loop_case = self.binder1()
            return S.CircElim(c, motive, scrut, base_case, x, loop_case)
        if val == "U":
            self.lx.next()
            kind2, which, _, _ = self.lx.peek()
            if which not in ("pre", "kan"):
                self.fail("expected 'pre' or 'kan'")
            self.lx.next()
            lvl = self.level()
            return S.UPre(lvl) if which == "pre" else S.UKan(lvl)
        if val == "V":
            self.lx.next()
            return S.V(self.dim(), self.atom(), self.atom(), self.atom())
        if val == "Vin":
            self.lx.next()
            return S.Vin(self.dim(), self.atom(), self.atom())
        if val == "Vproj":
            self.lx.next()
            return S.Vproj(self.dim(), self.atom(), self.atom())
        if val == "coe":
            self.lx.next()
            x, ty = self.binder1()
            src, dst = self.src_dst()
            return S.Coe(x, ty, src, dst, self.atom())
        if val == "hcom":
            self.lx.next()
            ty = self.atom()
            src, dst = self.src_dst()
            return S.Hcom(ty, src, dst, self.atom(), self.tubes())
        if val == "com":
            self.lx.next()
            y, ty = self.binder1()
            src, dst = self.src_dst()
            return S.Com(y, ty, src, dst, self.atom(), self.tubes())
        if val == "fcom":
            self.lx.next()
            src, dst = self.src_dst()
            return S.Fcom(src, dst, self.atom(), self.tubes())
        if val == "ghcom":
            self.lx.next()
            ty = self.atom()
            src, dst = self.src_dst()
            return S.Ghcom(ty, src, dst, self.atom(), self.tubes())
        if val == "gcom":
            self.lx.next()
            y, ty = self.binder1()
            src, dst = self.src_dst()
            return S.Gcom(y, ty, src, dst, self.atom(), self.tubes())
        if val == "box":
            self.lx.next()
            src, dst = self.src_dst()
            return S.Box(src, dst, self.atom(), self.faces())
        if val == "cap":
            self.lx.next()
            src, dst = self.src_dst()
            return S.Cap(src, dst, self.atom(), self.tubes())
        return self.atom()


def parse(text: str) -> Term:
    """Parse the canonical concrete syntax into a term."""
    p = _Parser(text)
    t = p.expr()
    kind, val, line, col = p.lx.peek()
    if kind != "eof":
        raise ParseError(f"trailing input starting at {val!r}", line, col)
    return t


# ---------------------------------------------------------------------------
# Printing


_LEAVES = (
    S.Var, S.Void, S.Nat, S.Bool, S.WBool, S.Circle, S.Star, S.Zero,
    S.True_, S.False_, S.Base,
)


def _atom(m: Term) -> str:
    return pretty(m) if isinstance(m, _LEAVES) else f"({pretty(m)})"


def _tubes(sys) -> str:
    return "".join(f" [{t.eq.lhs}={t.eq.rhs} {t.y}. {pretty(t.body)}]" for t in sys)


def _faces(faces) -> str:
    return "".join(f" [{f.eq.lhs}={f.eq.rhs} {pretty(f.body)}]" for f in faces)


def pretty(m: Term) -> str:
    """Print a term in the canonical concrete syntax."""
    match m:
        case S.Var(name):
            return name
        case S.Lam(a, body):
            return f"lam {a}. {pretty(body)}"
        case S.App(fn, arg):
            return f"app {_atom(fn)} {_atom(arg)}"
        case S.Pair(a, b):
            return f"pair {_atom(a)} {_atom(b)}"
        case S.Fst(p):
            return f"fst {_atom(p)}"
        case S.Snd(p):
            return f"snd {_atom(p)}"
        case S.DLam(x, body):
            return f"dlam {x}. {pretty(body)}"
        case S.DApp(fn, r):
            return f"dapp {_atom(fn)} {r}"
        case S.Pi(a, dom, cod):
            return f"pi ({a} : {pretty(dom)}) {_atom(cod)}"
        case S.Sg(a, dom, cod):
            return f"sg ({a} : {pretty(dom)}) {_atom(cod)}"
        case S.Path(x, ty, lhs, rhs):
            return f"path ({x}. {pretty(ty)}) {_atom(lhs)} {_atom(rhs)}"
        case S.Eq(ty, lhs, rhs):
            return f"eq {_atom(ty)} {_atom(lhs)} {_atom(rhs)}"
        case S.Void():
            return "void"
        case S.Nat():
            return "nat"
        case S.Bool():
            return "bool"
        case S.WBool():
            return "wbool"
        case S.Circle():
            return "S1"
        case S.UPre(j):
            return f"U pre {j}"
        case S.UKan(j):
            return f"U kan {j}"
        case S.V(r, a, b, e):
            return f"V {r} {_atom(a)} {_atom(b)} {_atom(e)}"
        case S.Vin(r, a, b):
            return f"Vin {r} {_atom(a)} {_atom(b)}"
        case S.Vproj(r, a, f):
            return f"Vproj {r} {_atom(a)} {_atom(f)}"
        case S.Star():
            return "*"
        case S.Zero():
            return "zero"
        case S.Suc(n):
            return f"suc {_atom(n)}"
        case S.NatRec(scrut, z, n, a, s):
            return f"natrec {_atom(scrut)} {_atom(z)} ({n} {a}. {pretty(s)})"
        case S.True_():
            return "true"
        case S.False_():
            return "false"
        case S.If(b, motive, scrut, t, f):
            return f"if ({b}. {pretty(motive)}) {_atom(scrut)} {_atom(t)} {_atom(f)}"
        case S.Base():
            return "base"
        case S.Loop(r):
            return f"loop {r}"
        case S.CircElim(c, motive, scrut, p, x, l):
            return (
                f"S1elim ({c}. {pretty(motive)}) {_atom(scrut)} {_atom(p)}"
                f" ({x}. {pretty(l)})"
            )
        case S.Coe(x, ty, src, dst, cap):
            return f"coe ({x}. {pretty(ty)}) {src} ~> {dst} {_atom(cap)}"
        case S.Hcom(ty, src, dst, cap, sys):
            return f"hcom {_atom(ty)} {src} ~> {dst} {_atom(cap)}{_tubes(sys)}"
        case S.Com(y, ty, src, dst, cap, sys):
            return f"com ({y}. {pretty(ty)}) {src} ~> {dst} {_atom(cap)}{_tubes(sys)}"
        case S.Fcom(src, dst, cap, sys):
            return f"fcom {src} ~> {dst} {_atom(cap)}{_tubes(sys)}"
        case S.Ghcom(ty, src, dst, cap, sys):
            return f"ghcom {_atom(ty)} {src} ~> {dst} {_atom(cap)}{_tubes(sys)}"
        case S.Gcom(y, ty, src, dst, cap, sys):
            return f"gcom ({y}. {pretty(ty)}) {src} ~> {dst} {_atom(cap)}{_tubes(sys)}"
        case S.Box(src, dst, cap, faces):
            return f"box {src} ~> {dst} {_atom(cap)}{_faces(faces)}"
        case S.Cap(src, dst, box, sys):
            return f"cap {src} ~> {dst} {_atom(box)}{_tubes(sys)}"
    raise TypeError(f"not a term: {m!r}")
