"""Wall-clock scaling benchmark over an (n, p) grid."""

from __future__ import annotations

import datetime as _dt
import os
import platform
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy import stats

from .elimination import solve
from .io import write_json
from .simulate import SimConfig, simulate

DEFAULT_N_GRID = (1000, 2000, 5000, 10000)
DEFAULT_P_GRID = (10, 20, 100, 200)
DEFAULT_M = 10
DEFAULT_REPS = 10

TIMING_SCOPE = (
    "wall clock around assembly + elimination + reduced solve + "
    "back-substitution + residual check; data generation, I/O and one "
    "warm-up solve per cell excluded"
)


@dataclass(frozen=True)
class BenchRow:
    n: int
    m: int
    p: int
    repetitions: int
    mean_seconds: float
    stddev_seconds: float


@dataclass
class BenchReport:
    rows: list[BenchRow]
    machine: str = field(default_factory=lambda: machine_description())
    timestamp: str = field(
        default_factory=lambda: _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    )
    timing_scope: str = TIMING_SCOPE

    def __post_init__(self):
        self.rows = sorted(self.rows, key=lambda r: (r.n, r.p))

    def to_dict(self) -> dict:
        return {
            "metadata": {
                "machine": self.machine,
                "timestamp": self.timestamp,
                "timing_scope": self.timing_scope,
            },
            "rows": [asdict(r) for r in self.rows],
        }

    def cell(self, n: int, p: int) -> BenchRow | None:
        for r in self.rows:
            if r.n == n and r.p == p:
                return r
        return None

    def table(self) -> str:
        """Plain-text table: one line per n, one column per p."""
        ns = sorted({r.n for r in self.rows})
        ps = sorted({r.p for r in self.rows})
        ms = sorted({r.m for r in self.rows})
        head = ["", *[f"p={p}" for p in ps]]
        body = []
        for n in ns:
            line = [f"n={n:,}"]
            for p in ps:
                cell = self.cell(n, p)
                line.append("-" if cell is None else f"{cell.mean_seconds:.3f}")
            body.append(line)
        widths = [max(len(row[j]) for row in [head, *body]) for j in range(len(head))]
        fmt = lambda row: "  ".join(s.rjust(w) for s, w in zip(row, widths))
        rule = "-" * len(fmt(head))
        caption = f"mean wall seconds, m={','.join(map(str, ms))}"
        return "\n".join([rule, fmt(head), rule, *map(fmt, body), rule, caption])


def machine_description() -> str:
    return f"{platform.processor() or platform.machine()}; {platform.platform()}; cpus={os.cpu_count()}"


def cell_seed(base_seed: int, n: int, p: int) -> int:
    """Fixed seed for one grid cell, independent of grid composition."""
    return int(np.random.SeedSequence([base_seed, n, p]).generate_state(1, np.uint64)[0])


def time_cell(n: int, m: int, p: int, repetitions: int, base_seed: int = 0) -> BenchRow:
    if repetitions < 1:
        raise ValueError("repetitions must be at least 1")
    design, _ = simulate(SimConfig(n=n, m=m, p=p, beta_true=np.ones(p), seed=cell_seed(base_seed, n, p)))
    solve(design)  # untimed warm-up
    times = np.array([solve(design).wall_time_seconds for _ in range(repetitions)])
    sd = float(times.std(ddof=1)) if repetitions > 1 else 0.0
    return BenchRow(n, m, p, repetitions, float(times.mean()), sd)


def run_bench(
    n_grid=DEFAULT_N_GRID,
    p_grid=DEFAULT_P_GRID,
    m: int = DEFAULT_M,
    repetitions: int = DEFAULT_REPS,
    base_seed: int = 0,
    progress=None,
) -> BenchReport:
    """Time every (n, p) cell sequentially."""
    rows = []
    for n in sorted(n_grid):
        for p in sorted(p_grid):
            row = time_cell(n, m, p, repetitions, base_seed)
            rows.append(row)
            if progress is not None:
                progress(row)
    return BenchReport(rows)


def loglog_slope(ns, times, confidence: float = 0.95) -> tuple[float, float, float]:
    """Least-squares slope of ``log(time)`` on ``log(n)`` with a t-interval.

    Returns ``(slope, lo, hi)``; the interval is NaN with fewer than three
    points.
    """
    x = np.log(np.asarray(ns, dtype=float))
    y = np.log(np.asarray(times, dtype=float))
    fit = stats.linregress(x, y)
    dof = x.size - 2
    if dof < 1:
        return float(fit.slope), float("nan"), float("nan")
    half = stats.t.ppf(0.5 + confidence / 2, dof) * fit.stderr
    return float(fit.slope), float(fit.slope - half), float(fit.slope + half)


def scaling_analysis(report: BenchReport) -> str:
    lines = ["log-log slope of time vs n (95% interval):"]
    for p in sorted({r.p for r in report.rows}):
        rows = [r for r in report.rows if r.p == p]
        if len(rows) < 2:
            continue
        slope, lo, hi = loglog_slope([r.n for r in rows], [r.mean_seconds for r in rows])
        lines.append(f"  p={p}: slope {slope:.3f}  [{lo:.3f}, {hi:.3f}]")
    return "\n".join(lines)


def reproduce_timing_grid(
    results_dir: str | os.PathLike = "results",
    n_grid=DEFAULT_N_GRID,
    p_grid=DEFAULT_P_GRID,
    m: int = DEFAULT_M,
    repetitions: int = DEFAULT_REPS,
    progress=None,
) -> Path:
    """Run the default grid and write ``bench.json``, ``table.txt`` and
    ``scaling.txt`` into a timestamped subfolder of ``results_dir``."""
    report = run_bench(n_grid, p_grid, m, repetitions, progress=progress)
    stamp = _dt.datetime.now().strftime("%Y%m%d-%H%M%S")
    out = Path(results_dir) / stamp
    out.mkdir(parents=True, exist_ok=True)
    write_json(out / "bench.json", report.to_dict())
    (out / "table.txt").write_text(report.table() + "\n")
    (out / "scaling.txt").write_text(scaling_analysis(report) + "\n")
    return out
