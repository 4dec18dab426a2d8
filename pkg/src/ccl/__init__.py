"""A Cartesian cubical programming language: interpreter and proof checker.

The package provides:

- ``ccl.cube``: dimensions, contexts, total substitutions, equation shapes;
- ``ccl.syntax``: the term language, binders, substitution, alpha-equality;
- ``ccl.parser``: concrete syntax (``parse`` / ``pretty``);
- ``ccl.opsem``: deterministic weak-head evaluation with Kan operations and
  cubical-stability tagging;
- ``ccl.checker``: judgments, the proof-rule catalog, derivation checking;
- ``ccl.gen`` / ``ccl.props``: the seeded term generator and the metatheorem
  property suites;
- ``ccl.corpus``: the executable program corpus and canonicity harness;
- ``ccl.cli``: the ``ccl`` command-line tool.
"""

from .cube import (
    DIM0,
    DIM1,
    Dim,
    DimConst,
    DimName,
    DimSubst,
    Equation,
    apply_dim,
    compose_subst,
    satisfies,
    valid,
)
from .parser import ParseError, parse, pretty
from .syntax import Term, alpha_eq, apply_subst, dsubst, fd, fv, tsubst
from .opsem import (
    DEFAULT_FUEL,
    FuelExhausted,
    StepsTo,
    Stuck,
    StuckError,
    Value,
    eval_term,
    force_numeral,
    is_val,
    step,
    trace,
)
from .checker import (
    Derivation,
    Judgment,
    check_derivation,
    expand_restriction,
    instantiate_rule,
    rule_catalog,
)

__all__ = [
    "DIM0", "DIM1", "Dim", "DimConst", "DimName", "DimSubst", "Equation",
    "apply_dim", "compose_subst", "satisfies", "valid",
    "ParseError", "parse", "pretty",
    "Term", "alpha_eq", "apply_subst", "dsubst", "fd", "fv", "tsubst",
    "DEFAULT_FUEL", "FuelExhausted", "StepsTo", "Stuck", "StuckError", "Value",
    "eval_term", "force_numeral", "is_val", "step", "trace",
    "Derivation", "Judgment", "check_derivation", "expand_restriction",
    "instantiate_rule", "rule_catalog",
]

__version__ = "0.1.0"
