"""Command line: ``pqtwistor check | example | oracle``.

Exit status of ``check``: 0 when every requested check holds, 1 when any
fails, 2 when the outcome is inconclusive (including every point skipped),
3 on input errors.  ``example`` and ``oracle`` exit 0 or 3.
"""

from __future__ import annotations

import argparse
import json
import sys

from .catalog import catalog_entry, catalog_list
from .checks import CHECK_NAMES
from .expr import PoleError
from .geometry import DegeneratePoint, SpecError
from .oracle import QUANTITIES, run_oracle
from .runner import EXIT_INPUT, exit_status, format_table, run_checks, to_json
from .specfile import dump_spec, load_spec


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors, which would read as "inconclusive"
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _add_source(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--spec", metavar="FILE", help="spec file to load")
    src.add_argument("--example", metavar="NAME", help="built-in catalog entry")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pqtwistor", description="Numerical checks for almost para-quaternionic structures.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    check = sub.add_parser("check", help="run checks on sampled points and report verdicts")
    _add_source(check)
    check.add_argument("--checks", metavar="A,B,...", help=f"comma-separated subset of: {', '.join(CHECK_NAMES)}")
    check.add_argument("--points", type=int, metavar="N", help="number of sampled points (default: the spec's sample_points)")
    check.add_argument("--seed", type=int, default=0, help="sampling seed (default 0)")
    check.add_argument("--tol-scale", type=float, default=1.0, metavar="X", help="multiply every tolerance by X")
    check.add_argument("--workers", type=int, default=1, metavar="N", help="run checks in N processes (output is unchanged)")
    check.add_argument("--json", metavar="OUT", help="write the JSON report to OUT ('-' for standard output)")

    example = sub.add_parser("example", help="list catalog entries or show one")
    example.add_argument("name", nargs="?", help="catalog entry; omit to list all")
    example.add_argument("--emit-spec", action="store_true", help="print the entry as a spec file")

    oracle = sub.add_parser("oracle", help="compare derivatives with central finite differences")
    _add_source(oracle)
    oracle.add_argument("--quantity", required=True, choices=QUANTITIES)
    oracle.add_argument("--point", required=True, help='coordinates, e.g. "0.1 0.2 -0.3 0.4"')
    oracle.add_argument("--step", type=float, default=1e-5, help="difference step (default 1e-5)")
    return parser


def _load(args):
    if args.spec is not None:
        return load_spec(args.spec)
    try:
        return catalog_entry(args.example).spec()
    except KeyError as exc:
        raise InputError(exc.args[0]) from None


def _cmd_check(args, out) -> int:
    spec = _load(args)
    names = [n.strip() for n in args.checks.split(",") if n.strip()] if args.checks else None
    try:
        doc = run_checks(spec, names, npoints=args.points, seed=args.seed, tol_scale=args.tol_scale, workers=args.workers)
    except KeyError as exc:
        raise InputError(exc.args[0]) from None
    text = to_json(doc)
    if args.json == "-":
        out.write(text)
    else:
        if args.json:
            with open(args.json, "w", encoding="utf-8") as fh:
                fh.write(text)
        out.write(format_table(doc) + "\n")
    return exit_status(doc)


def _cmd_example(args, out) -> int:
    if args.name is None:
        for name in catalog_list():
            out.write(f"{name}\n")
        return 0
    try:
        entry = catalog_entry(args.name)
    except KeyError as exc:
        raise InputError(exc.args[0]) from None
    spec = entry.spec()
    if args.emit_spec:
        out.write(dump_spec(spec))
        return 0
    out.write(f"{entry.name}: {spec.note}\n")
    out.write(f"  dimension {spec.dim}, {spec.mode} mode, {spec.connection} connection\n")
    if entry.note:
        out.write(f"  {entry.note}\n")
    out.write("  expected verdicts:\n")
    for check, verdict in entry.expected.items():
        out.write(f"    {check:<13} {verdict}\n")
    return 0


def _cmd_oracle(args, out) -> int:
    spec = _load(args)
    try:
        point = [float(t) for t in args.point.replace(",", " ").split()]
    except ValueError:
        raise InputError(f"cannot read point {args.point!r}") from None
    record = run_oracle(spec, args.quantity, point, args.step)
    out.write(json.dumps(record, indent=2) + "\n")
    return 0


COMMANDS = {"check": _cmd_check, "example": _cmd_example, "oracle": _cmd_oracle}


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args, out)
    except (InputError, SpecError, ValueError, PoleError, DegeneratePoint, OSError) as exc:
        sys.stderr.write(f"pqtwistor: error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
