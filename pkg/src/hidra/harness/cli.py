"""Command-line interface.

``hidra run CONFIG [--out DIR] [--jobs N] [--seed S]`` executes the expanded
experiment matrix and writes one trace CSV and one aggregate CSV per cell;
the exit code is 0 iff every cell completed. ``hidra list CONFIG`` prints
the expanded matrix without running anything.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from ..errors import ConfigError
from .config import parse_config
from .runner import run_matrix


def _describe(spec) -> str:
    noise = spec.noise
    noise_s = noise.kind
    if noise.kind == "multiplicative":
        noise_s += f"(c={noise.c:g})"
    elif noise.kind == "additive":
        noise_s += f"(eps={noise.epsilon:g})"
    elif noise.kind == "thresholded_additive":
        noise_s += f"(eps={noise.epsilon:g}, t={noise.threshold:g})"
    prob = spec.problem if spec.problem != "ellipsoid" else f"ellipsoid(k={spec.k:g})"
    return (
        f"{spec.algorithm}{'+uh' if spec.uh else ''} on {prob} d={spec.d} "
        f"noise={noise_s} budget={spec.budget} runs={spec.runs} seed={spec.seed}"
    )


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="hidra",
        description="Evolution-strategy experiment harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute the experiment matrix of a config file")
    run_p.add_argument("config", type=Path)
    run_p.add_argument("--out", type=Path, default=Path("results"),
                       help="output directory for CSV files (default: results)")
    run_p.add_argument("--jobs", type=int, default=1,
                       help="parallel worker processes over matrix cells and repetitions")
    run_p.add_argument("--seed", type=int, default=None,
                       help="override the config (and HIDRA_SEED) base seed")

    list_p = sub.add_parser("list", help="print the expanded experiment matrix")
    list_p.add_argument("config", type=Path)

    args = parser.parse_args(argv)

    try:
        specs = parse_config(args.config.read_text(),
                             seed_override=getattr(args, "seed", None))
    except FileNotFoundError:
        print(f"error: config file not found: {args.config}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(f"error: {args.config}: {exc}", file=sys.stderr)
        return 2

    if args.command == "list":
        for i, spec in enumerate(specs):
            print(f"[{i}] {spec.cell_name()}: {_describe(spec)}")
        print(f"{len(specs)} cell(s)")
        return 0

    results = run_matrix(specs, args.out, jobs=args.jobs)
    failed = 0
    for res in results:
        if res.ok:
            print(f"ok   {res.name}  ->  {res.trace_path}, {res.aggregate_path}")
        else:
            failed += 1
            print(f"FAIL {res.name}: {res.error}", file=sys.stderr)
    print(f"{len(results) - failed}/{len(results)} cell(s) completed")
    return 0 if failed == 0 else 1


def console() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console()
