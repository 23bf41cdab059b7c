"""Command-line front end.

Exit codes: 0 success, 1 counterexample or mismatch, 2 usage or parse
error, 3 evaluation error, 4 network error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import Optional

from . import catalog, oeis, report, verifier
from .dsl import EvalError, ParamAssignment, ParseError, evaluate, parse
from .seqcore import HoradamParams

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_EVAL = 3
EXIT_NETWORK = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage already; keep that but route the
    # message through stderr the same way as our own usage errors
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _specs(args) -> list:
    if args.catalog:
        try:
            return catalog.load(args.catalog)
        except OSError as exc:
            raise UsageError(f"cannot read catalog {args.catalog}: {exc}") from None
    return catalog.load_bundled()


def _find(specs, key: str) -> catalog.IdentitySpec:
    for s in specs:
        if s.id == key:
            return s
    raise UsageError(f"unknown identity {key!r}")


# --- list / show -------------------------------------------------------------


def cmd_list(args) -> int:
    for s in _specs(args):
        flag = "  [quarantined]" if s.quarantined else ""
        print(f"{s.id}  {s.anchor}  | {s.title}{flag}")
    return EXIT_OK


def cmd_show(args) -> int:
    spec = _find(_specs(args), args.id)
    print(spec.to_text())
    if spec.quarantined:
        store = _counterexamples()
        cx = store.get(spec.counterexample_id)
        if cx:
            print()
            print(f"counterexample {spec.counterexample_id}: {json.dumps(cx['assignment'])}")
            print(f"  lhs = {cx['lhs']}, rhs = {cx['rhs']}")
            if cx.get("note"):
                print(f"  {cx['note']}")
            if cx.get("fix"):
                print(f"  corrected record: {cx['fix']}")
    return EXIT_OK


def _counterexamples() -> dict:
    try:
        return catalog.counterexample_store()
    except (OSError, ValueError):
        return {}


# --- eval --------------------------------------------------------------------


def _binding(text: str):
    name, sep, value = text.partition("=")
    name = name.strip()
    if not sep or not name.isidentifier():
        raise UsageError(f"--set expects name=value, got {text!r}")
    try:
        v = Fraction(value.strip())
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"--set {name}: {value!r} is not an exact rational") from None
    return name, v


def cmd_eval(args) -> int:
    try:
        expr = parse(args.expr)
    except ParseError as exc:
        print(exc.diagnostic(), file=sys.stderr)
        return EXIT_USAGE
    ints, rats = {}, {}
    for item in args.set or []:
        name, v = _binding(item)
        ints.pop(name, None)
        rats.pop(name, None)
        if v.denominator == 1:
            ints[name] = v.numerator
        else:
            rats[name] = v
    h = None
    if args.horadam:
        try:
            h = HoradamParams.parse(args.horadam)
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"--horadam: {exc}") from None
    try:
        value = evaluate(expr, ParamAssignment(ints, rats, h))
    except EvalError as exc:
        print(f"evaluation error ({exc.kind}): {exc}", file=sys.stderr)
        return EXIT_EVAL
    text = report.rat_str(value)
    if args.json:
        print(json.dumps({
            "expr": args.expr,
            "bindings": {k: report.rat_str(v) for k, v in sorted({**ints, **rats}.items())},
            "horadam": str(h) if h else None,
            "value": text,
            "integer": value.denominator == 1,
        }, indent=2))
    else:
        print(text)
    return EXIT_OK


# --- verify ------------------------------------------------------------------


def _emit(doc: verifier.SuiteReport, args):
    text = report.dumps(doc)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(text)
    if args.json:
        sys.stdout.write(text)


def cmd_verify(args) -> int:
    specs = _specs(args)
    if args.all and args.ids:
        raise UsageError("give identity ids or --all, not both")
    if not args.all and not args.ids:
        raise UsageError("give at least one identity id, or --all")
    if args.grid and (args.all or len(args.ids) != 1):
        raise UsageError("--grid applies to exactly one identity")
    if args.random and args.grid:
        raise UsageError("--grid and --random are exclusive")
    if args.count is not None and args.count < 0:
        raise UsageError("--count must be non-negative")
    rs = verifier.RandomSpec(seed=args.seed, count=args.count if args.count is not None else 100)
    mode = "random" if args.random else "grid"
    workers = args.workers or 1
    say = print if not args.json else (lambda *a, **k: print(*a, file=sys.stderr, **k))

    if args.all:
        suite = verifier.verify_all(specs, mode, workers, rs if args.random else None)
        for r in suite.reports:
            say(r.summary())
        say(suite.summary())
        _emit(suite, args)
        return EXIT_OK if suite.passed else EXIT_FAIL

    try:
        chosen = catalog.select(args.ids, specs)
    except KeyError as exc:
        raise UsageError(f"unknown identity {exc.args[0]!r}") from None
    grids = {}
    if args.grid:
        try:
            grids[chosen[0].id] = verifier.GridSpec.parse(args.grid, chosen[0])
        except verifier.GridError as exc:
            raise UsageError(f"bad --grid: {exc}") from None
    suite = verifier.verify_all(chosen, mode, workers, rs if args.random else None, grids,
                                include_quarantined=True)
    for r in suite.reports:
        spec = _find(specs, r.identity_id)
        note = f"  [quarantined: {spec.counterexample_id}]" if spec.quarantined else ""
        say(r.summary() + note)
        for f in r.failures[:3]:
            say("  " + _failure_line(f))
    _emit(suite, args)
    return EXIT_OK if suite.passed else EXIT_FAIL


def _failure_line(f: verifier.Failure) -> str:
    asg = ", ".join(f"{k}={report._value_str(v)}" for k, v in f.assignment.items())
    if f.kind == "mismatch":
        return f"counterexample {asg}: lhs={report.rat_str(f.lhs)} rhs={report.rat_str(f.rhs)}"
    return f"evaluation error at {asg} ({f.side}): {f.error}"


# --- oeis-check --------------------------------------------------------------


def cmd_oeis_check(args) -> int:
    if args.limit < 1:
        raise UsageError("--limit must be at least 1")
    try:
        res = oeis.check(args.sequence, args.limit, offline=args.offline)
    except oeis.NetworkError as exc:
        hint = "" if args.offline else " (use --offline to check against the bundled fixture)"
        print(f"network error: {exc}{hint}", file=sys.stderr)
        return EXIT_NETWORK
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    print(res.message())
    return EXIT_OK if res.ok else EXIT_FAIL


# --- entry point -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="binsum", description="Exact verification of binomial-sum identities.")
    ap.add_argument("--catalog", metavar="PATH", help="catalog file (default: bundled)")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("list", help="list catalog records")
    p.set_defaults(func=cmd_list)

    p = sub.add_parser("show", help="print one record")
    p.add_argument("id")
    p.set_defaults(func=cmd_show)

    p = sub.add_parser("eval", help="evaluate an expression exactly")
    p.add_argument("expr")
    p.add_argument("--set", action="append", metavar="NAME=VALUE")
    p.add_argument("--horadam", metavar="A,B,P,Q")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("verify", help="verify identities over a grid or random samples")
    p.add_argument("ids", nargs="*")
    p.add_argument("--all", action="store_true")
    p.add_argument("--grid", metavar="OVERRIDES", help="e.g. n=0..3,r=0..0")
    p.add_argument("--random", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int)
    p.add_argument("--workers", type=int, default=None,
                   help="worker processes (default 1; 0 means one per CPU)")
    p.add_argument("--json", action="store_true")
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oeis-check", help="compare fib/lucas with OEIS b-files")
    p.add_argument("sequence", choices=sorted(oeis.SEQUENCES))
    p.add_argument("--limit", type=int, default=50)
    p.add_argument("--offline", action="store_true")
    p.set_defaults(func=cmd_oeis_check)
    return ap


def main(argv: Optional[list] = None) -> int:
    # exact values are printed in full, however many digits they have
    if hasattr(sys, "set_int_max_str_digits"):
        sys.set_int_max_str_digits(0)
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    if getattr(args, "workers", None) == 0:
        args.workers = os.cpu_count() or 1
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"binsum: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except catalog.CatalogError as exc:
        print(f"binsum: catalog error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
