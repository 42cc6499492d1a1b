"""Time the solver on the default (n, p) grid and write a results folder.

    python scripts/reproduce_timing_grid.py [--results-dir results] [--reps 10]

Writes bench.json, table.txt and scaling.txt (log-log slope of time vs n
for each p) under results/<timestamp>/.
"""

import argparse
import sys

from fastmme import bench


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--results-dir", default="results")
    parser.add_argument("--reps", type=int, default=bench.DEFAULT_REPS)
    args = parser.parse_args(argv)

    def progress(row):
        print(f"n={row.n:>6} p={row.p:>4}: {row.mean_seconds:.4f} s", file=sys.stderr)

    out = bench.reproduce_timing_grid(args.results_dir, repetitions=args.reps, progress=progress)
    print((out / "table.txt").read_text())
    print((out / "scaling.txt").read_text())
    print(f"results in {out}")


if __name__ == "__main__":
    main()
