"""Command-line front end.

::

    fastmme solve --input design.csv --lambda 1 --output fit.json
    fastmme gen --n 1000 --m 10 --p 10 --beta 1 --seed 7 --output design.csv
    fastmme bench --n-grid 1000,2000 --p-grid 10,20 --m 10 --reps 10 --output bench.json

Exit status: 0 success, 1 I/O failure, 2 parse error, 3 singular system.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import bench as _bench
from .elimination import solve
from .io import ParseError, read_csv, solution_record, write_csv, write_json
from .model import DesignError, SingularSystemError, VarianceRatio
from .simulate import SimConfig, simulate

EXIT_OK, EXIT_IO, EXIT_PARSE, EXIT_SINGULAR = 0, 1, 2, 3


def _int_list(text: str) -> list[int]:
    try:
        values = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values or min(values) < 1:
        raise argparse.ArgumentTypeError("grid values must be positive integers")
    return values


def parse_beta(spec: str, p: int) -> np.ndarray:
    """``"1,-1,0.5"`` gives one value per covariate; a single value is repeated."""
    values = np.array([float(t) for t in spec.split(",")])
    if values.size == 1:
        return np.full(p, values[0])
    if values.size != p:
        raise ValueError(f"--beta has {values.size} values but p={p}")
    return values


def sidecar_path(output: Path) -> Path:
    return output.with_name(output.stem + ".truth.json")


def cmd_solve(args) -> int:
    try:
        lam = VarianceRatio(args.lam)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        design, labels = read_csv(args.input)
    except (ParseError, DesignError) as exc:
        print(f"parse error in {args.input}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"cannot read {args.input}: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        sol = solve(design, lam)
    except SingularSystemError as exc:
        print(f"singular system: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    try:
        write_json(args.output, solution_record(sol, design, lam.value, labels))
    except OSError as exc:
        print(f"cannot write {args.output}: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def cmd_gen(args) -> int:
    try:
        beta = parse_beta(args.beta, args.p)
        config = SimConfig(
            n=args.n, m=args.m, p=args.p, beta_true=beta, seed=args.seed,
            covariate_law="intercept" if args.intercept else "normal",
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    design, v_true = simulate(config)
    output = Path(args.output)
    try:
        write_csv(output, design)
        write_json(sidecar_path(output), {
            "beta_true": list(config.beta_true),
            "v_true": v_true.tolist(),
            "seed": args.seed,
            "covariate_law": config.covariate_law,
        })
    except OSError as exc:
        print(f"cannot write {output}: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def cmd_bench(args) -> int:
    def progress(row):
        print(f"n={row.n} p={row.p}: {row.mean_seconds:.4f} s", file=sys.stderr)

    report = _bench.run_bench(args.n_grid, args.p_grid, args.m, args.reps, progress=progress)
    table = report.table()
    print(table)
    output = Path(args.output)
    try:
        write_json(output, report.to_dict())
        output.with_suffix(".txt").write_text(table + "\n")
    except OSError as exc:
        print(f"cannot write {output}: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fastmme", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="fit a design CSV and write JSON estimates")
    p.add_argument("--input", required=True)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("gen", help="write a simulated design CSV")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--beta", default="1", help="comma-separated values, or one value for all")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--intercept", action="store_true", help="make x1 a constant column")
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="time the solver over an (n, p) grid")
    p.add_argument("--n-grid", type=_int_list, default=list(_bench.DEFAULT_N_GRID))
    p.add_argument("--p-grid", type=_int_list, default=list(_bench.DEFAULT_P_GRID))
    p.add_argument("--m", type=int, default=_bench.DEFAULT_M)
    p.add_argument("--reps", type=int, default=_bench.DEFAULT_REPS)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
