"""Command-line front end: evaluate, trace, check, canonicity, proptest.

Exit codes: 0 success, 1 evaluation or check failure, 2 usage or parse
error.  The environment variable ``CCL_FUEL`` overrides the default step
budget.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import opsem
from .checker import check_derivation, derivation_from_json
from .corpus import corpus_dir, run_canonicity
from .opsem import DEFAULT_FUEL, FuelExhausted, StuckError, eval_term, trace
from .parser import ParseError, parse, pretty
from .props import SUITES, run_suite


def _default_fuel() -> int:
    env = os.environ.get("CCL_FUEL")
    return int(env) if env else DEFAULT_FUEL


def _read_source(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _parse_file(path: str):
    try:
        return parse(_read_source(path))
    except OSError as e:
        print(f"ccl: cannot read {path}: {e}", file=sys.stderr)
        raise SystemExit(2)
    except ParseError as e:
        print(f"ccl: parse error in {path}: {e}", file=sys.stderr)
        raise SystemExit(2)


def cmd_eval(args) -> int:
    term = _parse_file(args.file)
    try:
        value, _ = eval_term(term, args.fuel)
    except StuckError as e:
        print(f"ccl: stuck at: {e.reason}", file=sys.stderr)
        return 1
    except FuelExhausted:
        print(f"ccl: fuel exhausted after {args.fuel} steps", file=sys.stderr)
        return 1
    print(pretty(value))
    return 0


def cmd_trace(args) -> int:
    term = _parse_file(args.file)
    tr = trace(term, args.fuel)
    if args.json:
        print(json.dumps(tr.to_json(), indent=1))
    else:
        print(f"  {pretty(tr.initial)}")
        for t, rule, stable, via in tr.steps:
            mark = "*" if stable else " "
            shown = rule if via == rule else f"{rule} via {via}"
            print(f"{mark} [{shown}] {pretty(t)}")
        if isinstance(tr.final, opsem.Value):
            print(f"value after {tr.fuel_used} steps ({tr.final.rule})")
        elif isinstance(tr.final, opsem.Stuck):
            print(f"stuck after {tr.fuel_used} steps at: {tr.final.reason}")
        else:
            print(f"fuel exhausted after {tr.fuel_used} steps")
    if isinstance(tr.final, opsem.Value):
        return 0
    return 1


def cmd_check(args) -> int:
    try:
        payload = json.loads(_read_source(args.file))
        deriv = derivation_from_json(payload)
    except OSError as e:
        print(f"ccl: cannot read {args.file}: {e}", file=sys.stderr)
        return 2
    except (json.JSONDecodeError, ValueError, KeyError) as e:
        print(f"ccl: malformed derivation file: {e}", file=sys.stderr)
        return 2
    report = check_derivation(deriv)
    if report.ok:
        print("ok")
        return 0
    loc = "/".join(str(i) for i in report.path) or "root"
    print(f"error at {loc}: {report.reason}")
    return 1


def cmd_canonicity(args) -> int:
    directory = Path(args.dir) if args.dir else corpus_dir()
    results = run_canonicity(directory, args.fuel)
    width = max(len(r.name) for r in results)
    failed = 0
    for r in results:
        status = "ok  " if r.ok else "FAIL"
        line = f"{status} {r.name:<{width}} => {r.got}"
        if not r.ok:
            failed += 1
            line += f" (expected {r.expected})"
            if r.detail:
                line += f" [{r.detail}]"
        print(line)
    print(f"{len(results) - failed}/{len(results)} passed")
    return 1 if failed else 0


def cmd_proptest(args) -> int:
    failures = run_suite(args.suite, args.n, args.seed)
    if not failures:
        print(f"{args.suite}: {args.n} cases passed (seed {args.seed})")
        return 0
    for f in failures:
        print(f"{args.suite}: FAILED\n{f}")
    return 1


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="ccl",
        description="Evaluate and check programs of a Cartesian cubical language.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a program to a value")
    p.add_argument("file", help="program file, or - for stdin")
    p.add_argument("--fuel", type=int, default=_default_fuel())
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("trace", help="print the full step sequence")
    p.add_argument("file")
    p.add_argument("--json", action="store_true", help="emit the JSON trace")
    p.add_argument("--fuel", type=int, default=_default_fuel())
    p.set_defaults(fn=cmd_trace)

    p = sub.add_parser("check", help="check a derivation file")
    p.add_argument("file")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("canonicity", help="run the program corpus")
    p.add_argument("dir", nargs="?", help="corpus directory (default: bundled)")
    p.add_argument("--fuel", type=int, default=_default_fuel())
    p.set_defaults(fn=cmd_canonicity)

    p = sub.add_parser("proptest", help="run a metatheorem property suite")
    p.add_argument("suite", choices=SUITES)
    p.add_argument("--n", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_proptest)

    args = ap.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
