"""Command line front end.

Exit codes: 0 success / feasible / packing exists, 1 infeasible / invalid
packing / no packing, 2 usage or parse error, 3 capacity limit exceeded,
4 internal consistency error.
"""

from __future__ import annotations

import argparse
import sys

from .conditions import check_feasible, witness_to_json
from .core import MixedGraph
from .errors import CapacityError, InputError, InternalConsistencyError, PreconditionError
from .io import dumps, load_instance, load_packing, read_json
from .pack import solve
from .pieo import laminarize_type1
from .verify import oracle_pack_exists, verify_packing

EXIT_OK, EXIT_NO, EXIT_USAGE, EXIT_CAPACITY, EXIT_INTERNAL = 0, 1, 2, 3, 4


def _emit(text: str) -> None:
    sys.stdout.write(text + "\n")


def cmd_check(args) -> int:
    graph, bounds = load_instance(args.input)
    report = check_feasible(graph, bounds, args.max_n)
    if args.json:
        _emit(dumps(report.to_dict(graph)))
    elif report.feasible:
        _emit("feasible")
        _emit("minimum slack: " + ", ".join(f"{c}={s}" for c, s in sorted(report.slack_summary.items())))
    else:
        _emit(f"infeasible: condition {report.violated_condition} fails "
              f"({report.lhs} < {report.rhs})")
        _emit(f"witness: {witness_to_json(graph, report.witness)}")
    return EXIT_OK if report.feasible else EXIT_NO


def _solve_doc(graph: MixedGraph, outcome, trace: bool) -> dict:
    doc = outcome.packing.to_dict()
    doc["roots"] = dict(outcome.roots)
    if trace:
        doc["trace"] = [s.to_dict(graph) for s in outcome.orientation.step_log]
    return doc


def cmd_solve(args) -> int:
    graph, bounds = load_instance(args.input)
    outcome = solve(graph, bounds, paranoid=args.paranoid, max_n=args.max_n)
    if outcome.packing is None:
        _emit(dumps(outcome.report.to_dict(graph)))
        return EXIT_NO
    _emit(dumps(_solve_doc(graph, outcome, args.trace)))
    return EXIT_OK


def cmd_verify(args) -> int:
    if not args.packing:
        raise InputError("verify needs --packing FILE")
    graph, bounds = load_instance(args.input)
    packing = load_packing(args.packing)
    report = verify_packing(graph, bounds, packing)
    if args.json:
        _emit(dumps(report.to_dict()))
    else:
        _emit("ok" if report.ok else "invalid packing")
        for f in report.failures:
            _emit(f"  tree {f.tree}: {f.reason} {list(f.elements) if f.elements else ''}".rstrip())
    return EXIT_OK if report.ok else EXIT_NO


def cmd_oracle(args) -> int:
    graph, bounds = load_instance(args.input)
    exists, packing = oracle_pack_exists(graph, bounds)
    if args.json:
        _emit(dumps({"exists": exists, "packing": packing.to_dict() if packing else None}))
    else:
        _emit("packing exists" if exists else "no packing")
        if packing:
            _emit(dumps(packing.to_dict()))
    return EXIT_OK if exists else EXIT_NO


def cmd_pieo_trace(args) -> int:
    doc = read_json(args.input)
    if not isinstance(doc, dict) or not isinstance(doc.get("f1"), list) or not isinstance(doc.get("f2"), list):
        raise InputError("pieo-trace input must be an object with list-of-lists 'f1' and 'f2'")
    trace = laminarize_type1(doc["f1"], doc["f2"])
    _emit(dumps(trace.to_dict()))
    return EXIT_OK


COMMANDS = {
    "check": cmd_check,
    "solve": cmd_solve,
    "verify": cmd_verify,
    "oracle": cmd_oracle,
    "pieo-trace": cmd_pieo_trace,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="arbopack",
        description="Root-bounded arborescence packing in mixed graphs.")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--input", required=True, help="instance JSON (or f1/f2 families for pieo-trace)")
    parser.add_argument("--packing", help="packing JSON for verify")
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    parser.add_argument("--trace", action="store_true", help="solve: attach the orientation step log")
    parser.add_argument("--paranoid", action=argparse.BooleanOptionalAction, default=None,
                        help="re-check invariants after every step (default: on up to 8 vertices)")
    parser.add_argument("--seedless", action="store_true",
                        help="accepted for compatibility; every command is deterministic")
    parser.add_argument("--max-n", type=int, default=None,
                        help="enumeration limit on |V| (default $ARBOPACK_MAX_N or 10)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except CapacityError as exc:
        print(f"arbopack: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (InputError, PreconditionError) as exc:
        print(f"arbopack: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InternalConsistencyError as exc:
        graph = load_instance(args.input)[0] if exc.step_log else None
        bundle = {"error": str(exc), "command": args.command, "input": args.input,
                  "step_log": [s.to_dict(graph) for s in exc.step_log]}
        print(dumps(bundle), file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
