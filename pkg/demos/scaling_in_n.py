"""
Run time grows linearly in the number of groups
===============================================

Each group costs one rank-one update of a p x p matrix, so at fixed p the
time should scale like n. We time a small grid and fit the log-log slope.
"""

from fastmme import bench

report = bench.run_bench(n_grid=[500, 1000, 2000, 4000], p_grid=[5, 50], m=10, repetitions=5)
print(report.table())
print(bench.scaling_analysis(report))
