"""Command-line front end: solve one instance, generate instance files, or
benchmark a directory.

Exit codes: 0 on success (a certified absence of pure equilibria is a valid
answer), 2 on usage or instance-format errors, 3 on solver failures.
"""

import argparse
import sys
from pathlib import Path

from ..cng import generate_instances, to_game_instance
from ..errors import InstanceFormatError, IpgError
from .bench import render_csv, run_bench
from .runner import ALGORITHMS, run_algorithm
from .serialize import dumps_instance, load_instance


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="ipgkit",
        description="Equilibrium solvers for binary games with bilinear payoffs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="run one algorithm on one instance file")
    solve.add_argument("--algo", required=True, choices=ALGORITHMS)
    solve.add_argument("--instance", required=True, type=Path)
    solve.add_argument(
        "--selection",
        default="welfare",
        help="zeror objective: welfare or player:i (default welfare)",
    )
    solve.add_argument("--time-limit", type=float, default=None, metavar="SECONDS")
    solve.add_argument("--max-iter", type=int, default=1000)
    solve.add_argument("--tie-break", choices=("opt", "pess"), default="opt")
    solve.add_argument(
        "--pretty", action="store_true", help="append a human-readable table"
    )

    gen = sub.add_parser("gen-cng", help="write synthetic critical-node instances")
    gen.add_argument("--size", required=True, type=int)
    gen.add_argument("--count", required=True, type=int)
    gen.add_argument("--seed", required=True, type=int)
    gen.add_argument("--out", required=True, type=Path)

    bench = sub.add_parser("bench", help="run algorithms over a directory")
    bench.add_argument("--dir", required=True, type=Path)
    bench.add_argument(
        "--algos", default="zeror,mcnp", help="comma-separated list (default zeror,mcnp)"
    )
    bench.add_argument("--time-limit", type=float, default=None, metavar="SECONDS")
    bench.add_argument("--selection", default="welfare")
    bench.add_argument("--max-iter", type=int, default=1000)
    bench.add_argument("--out", required=True, type=Path)
    return parser


def _pretty_lines(record) -> str:
    doc = record.to_dict()
    width = max(len(k) for k in doc)
    lines = [f"{k.ljust(width)}  {doc[k]}" for k in sorted(doc) if doc[k] not in (None, "")]
    return "\n".join(lines)


def _cmd_solve(args) -> int:
    doc = load_instance(args.instance)
    tie_break = "optimistic" if args.tie_break == "opt" else "pessimistic"
    try:
        record = run_algorithm(
            doc,
            args.algo,
            selection=args.selection,
            time_limit=args.time_limit,
            max_iterations=args.max_iter,
            tie_break=tie_break,
        )
    except ValueError as exc:
        print(f"ipgkit: {exc}", file=sys.stderr)
        return 2
    print(record.to_json())
    if args.pretty:
        print(_pretty_lines(record))
    return 0


def _cmd_gen_cng(args) -> int:
    args.out.mkdir(parents=True, exist_ok=True)
    for instance in generate_instances(args.size, args.count, args.seed):
        path = args.out / f"{instance.name}.json"
        path.write_text(dumps_instance(to_game_instance(instance), instance))
    return 0


def _cmd_bench(args) -> int:
    algos = [a for a in args.algos.split(",") if a]
    for algo in algos:
        if algo not in ALGORITHMS:
            print(f"ipgkit: unknown algorithm {algo!r}", file=sys.stderr)
            return 2
    rows, summary = run_bench(
        args.dir,
        algos,
        time_limit=args.time_limit,
        selection=args.selection,
        max_iterations=args.max_iter,
    )
    args.out.write_text(render_csv(rows, summary))
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "solve":
            return _cmd_solve(args)
        if args.command == "gen-cng":
            return _cmd_gen_cng(args)
        return _cmd_bench(args)
    except InstanceFormatError as exc:
        print(f"ipgkit: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"ipgkit: {exc}", file=sys.stderr)
        return 2
    except IpgError as exc:
        print(f"ipgkit: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
