"""Command-line front end: gen / run / bench.

Exit codes: 0 success, 2 verification failure, 3 input error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import harness
from .geom import DuplicateId, UnknownId
from .rects import CoordinateOutOfUniverse, PinNotContained, SizeOutOfRange

INPUT_ERRORS = (harness.InvalidParams, harness.ParseError, harness.KindMismatch,
                CoordinateOutOfUniverse, SizeOutOfRange, PinNotContained,
                DuplicateId, UnknownId, OSError)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cfcolor",
        description="Dynamic conflict-free coloring workloads: generate, replay, bench.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a deterministic JSONL workload")
    gen.add_argument("--kind", required=True, choices=harness.KINDS)
    gen.add_argument("--n", type=int, required=True, help="number of insertions")
    gen.add_argument("--delete-ratio", type=float, default=0.0)
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--span", type=float, default=None,
                     help="coordinate range (universe_rect: max coordinate)")
    gen.add_argument("--c", type=float, default=None, help="side bound for bounded_rect")
    gen.add_argument("--universe", type=int, default=None, help="universe size N")
    gen.add_argument("--out", required=True, help="output workload path")

    run = sub.add_parser("run", help="replay a workload against a structure")
    run.add_argument("--structure", required=True, choices=harness.STRUCTURES)
    run.add_argument("--workload", required=True)
    run.add_argument("--verify", default="invariants",
                     choices=("none", "invariants", "oracle-sampled", "oracle-every-step"))
    run.add_argument("--c", type=float, default=None)
    run.add_argument("--universe", type=int, default=None)
    run.add_argument("--report", required=True, help="report path (JSON; CSV twin)")

    bench = sub.add_parser("bench", help="seeded trials across sizes")
    bench.add_argument("--structure", required=True, choices=harness.STRUCTURES)
    bench.add_argument("--sizes", required=True,
                       help="comma-separated insertion counts, e.g. 128,256,512")
    bench.add_argument("--seeds", required=True, help="comma-separated seeds")
    bench.add_argument("--delete-ratio", type=float, default=0.3)
    bench.add_argument("--c", type=float, default=None)
    bench.add_argument("--universe", type=int, default=None)
    bench.add_argument("--report", required=True)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "gen":
            events = harness.generate_workload(
                args.kind, args.n, args.delete_ratio, args.seed,
                span=args.span, c=args.c, universe=args.universe)
            harness.write_workload(events, args.out)
            print(f"wrote {len(events)} events to {args.out}")
            return 0
        if args.command == "run":
            events = harness.read_workload(args.workload)
            report = harness.run_workload(
                args.structure, events, verify=args.verify,
                c=args.c, universe=args.universe,
                config_extra={"workload": args.workload})
            harness.write_report(report, args.report)
            bad = report["summary"]["violations"]
            if bad:
                print(json.dumps(bad[0], sort_keys=True), file=sys.stderr)
                print(f"report written to {args.report}: "
                      f"{len(bad)} verification failure(s)", file=sys.stderr)
                return 2
            print(f"report written to {args.report}: all checks passed")
            return 0
        # bench
        sizes = [int(s) for s in args.sizes.split(",") if s]
        seeds = [int(s) for s in args.seeds.split(",") if s]
        if not sizes or not seeds:
            raise harness.InvalidParams("sizes and seeds must be non-empty")
        bench = harness.run_bench(args.structure, sizes, seeds,
                                  delete_ratio=args.delete_ratio,
                                  c=args.c, universe=args.universe)
        harness.write_bench(bench, args.report)
        print(f"bench report written to {args.report} "
              f"({len(bench['trials'])} trials)")
        return 0
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
