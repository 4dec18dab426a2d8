"""The executable program corpus and its canonicity harness.

Corpus entries are concrete-syntax programs with hand-traced expected
values.  Boolean entries must evaluate to the expected constant; numeral
entries are forced through the lazy successor.  Entries may point at a
derivation file, which must check and must conclude something about the
program.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from . import syntax as S
from .checker import EqTm, check_derivation, derivation_from_json
from .opsem import DEFAULT_FUEL, eval_term, force_numeral
from .parser import parse, pretty
from .syntax import alpha_eq, fd


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    source: str
    expected: str | None
    derivation: str | None  # path relative to the corpus directory
    tags: tuple

    def term(self):
        return parse(self.source)

    def psi(self) -> frozenset:
        return fd(self.term())


def corpus_dir() -> Path:
    """The packaged corpus shipped with the library."""
    return Path(__file__).parent / "corpus_data"


def load_corpus(directory: str | Path | None = None) -> list[CorpusEntry]:
    directory = Path(directory) if directory else corpus_dir()
    manifest = json.loads((directory / "manifest.json").read_text())
    out = []
    for row in manifest:
        source = (directory / row["file"]).read_text().strip()
        out.append(
            CorpusEntry(
                name=row["name"],
                source=source,
                expected=row.get("expected"),
                derivation=row.get("derivation"),
                tags=tuple(row.get("tags", ())),
            )
        )
    return out


@dataclass
class CanonicityResult:
    name: str
    ok: bool
    got: str
    expected: str
    detail: str = ""


def _numeral_value(term) -> int:
    k = 0
    while isinstance(term, S.Suc):
        k += 1
        term = term.n
    if not isinstance(term, S.Zero):
        raise ValueError(f"expected value is not a numeral: {pretty(term)}")
    return k


def run_entry(entry: CorpusEntry, directory: Path | None = None,
              fuel: int = DEFAULT_FUEL) -> CanonicityResult:
    directory = Path(directory) if directory else corpus_dir()
    term = entry.term()
    try:
        if "nat" in entry.tags:
            got = S.numeral(force_numeral(term, fuel))
        else:
            got, _ = eval_term(term, fuel)
    except Exception as e:
        return CanonicityResult(entry.name, False, f"error: {e}", entry.expected or "")

    expected = parse(entry.expected) if entry.expected else None
    ok = True
    detail = ""
    if "nat" in entry.tags:
        canonical = isinstance(got, (S.Zero, S.Suc))
        if expected is not None:
            ok = canonical and _numeral_value(got) == _numeral_value(expected)
    else:
        canonical = isinstance(got, (S.True_, S.False_))
        if not canonical:
            ok, detail = False, "not a canonical boolean"
        elif expected is not None:
            ok = alpha_eq(got, expected)
    if ok and entry.derivation:
        deriv = derivation_from_json(
            json.loads((directory / entry.derivation).read_text())
        )
        report = check_derivation(deriv)
        if not report.ok:
            ok, detail = False, f"derivation rejected: {report.reason}"
        elif not (
            isinstance(deriv.conclusion.form, EqTm)
            and alpha_eq(deriv.conclusion.form.lhs, term)
        ):
            ok, detail = False, "derivation does not conclude about this program"
    return CanonicityResult(
        entry.name, ok, pretty(got), entry.expected or "", detail
    )


def run_canonicity(directory: str | Path | None = None,
                   fuel: int = DEFAULT_FUEL) -> list[CanonicityResult]:
    directory = Path(directory) if directory else corpus_dir()
    return [run_entry(e, directory, fuel) for e in load_corpus(directory)]
