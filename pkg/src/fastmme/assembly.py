"""Sufficient statistics of the mixed model equations, without ``Z``.

Because ``Z`` is a block indicator, every block involving it reduces to a
per-group sum:

* ``Z'X`` has row ``i`` equal to the column sums of ``X_i``;
* ``Z'Y`` has entry ``i`` equal to the sum of ``Y_i``;
* ``Z'Z + lambda I`` is diagonal with entries ``m_i + lambda``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.linalg.blas import dsyrk

from .model import GroupedDesign, NonFiniteAccumulationError, VarianceRatio


@dataclass(frozen=True)
class HendersonBlocks:
    """Everything the elimination needs.

    Attributes
    ----------
    xtx : (p, p)
        ``X'X``, exactly symmetric.
    g : (n, p)
        ``Z'X``; row ``i`` is the within-group covariate sum.
    u : (n,)
        ``Z'Y``; per-group response sums.
    w : (p,)
        ``X'Y``.
    d : (n,)
        Diagonal of ``Z'Z + lambda I``.
    """

    xtx: np.ndarray
    g: np.ndarray
    u: np.ndarray
    w: np.ndarray
    d: np.ndarray

    @property
    def n(self) -> int:
        return self.g.shape[0]

    @property
    def p(self) -> int:
        return self.g.shape[1]

    def rhs(self) -> np.ndarray:
        """The stacked right-hand side ``c = (X'Y, Z'Y)``."""
        return np.concatenate([self.w, self.u])

    def matvec(self, beta: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Evaluate ``A (beta, v)`` blockwise, returning the two block rows."""
        top = self.xtx @ beta + self.g.T @ v
        bottom = self.g @ beta + self.d * v
        return top, bottom

    def residual(self, beta: np.ndarray, v: np.ndarray) -> np.ndarray:
        """``A delta - c`` without forming ``A``."""
        top, bottom = self.matvec(beta, v)
        return np.concatenate([top - self.w, bottom - self.u])


def _upper_gram(X: np.ndarray) -> np.ndarray:
    # dsyrk fills only the upper triangle of X'X
    if X.shape[0] == 0:
        return np.zeros((X.shape[1], X.shape[1]))
    return dsyrk(1.0, np.asfortranarray(X), trans=1, lower=0)


def _mirror_upper(c: np.ndarray) -> np.ndarray:
    upper = np.triu(c)
    return np.ascontiguousarray(upper + np.triu(upper, 1).T)


def _partial_stats(X, y, offsets):
    return (
        _upper_gram(X),
        np.add.reduceat(X, offsets, axis=0),
        np.add.reduceat(y, offsets),
        X.T @ y,
    )


def assemble(
    design: GroupedDesign,
    ratio: VarianceRatio | float = 1.0,
    workers: int | None = None,
) -> HendersonBlocks:
    """Compute ``X'X``, ``Z'X``, ``Z'Y``, ``X'Y`` and ``diag(Z'Z + lambda I)``.

    Parameters
    ----------
    design : GroupedDesign
    ratio : VarianceRatio or float
        Value added to each group size on the diagonal block.
    workers : int, optional
        If given and > 1, groups are split into that many contiguous chunks
        that are summarised concurrently and then reduced in chunk order.
        Results agree with the sequential path to rounding.

    Raises
    ------
    NonFiniteAccumulationError
        If any accumulated statistic overflows.
    """
    lam = VarianceRatio.coerce(ratio).value
    with np.errstate(over="ignore", invalid="ignore"):
        if workers is None or workers <= 1 or design.n < 2:
            upper, g, u, w = _partial_stats(design.X, design.y, design.offsets)
        else:
            upper, g, u, w = _assemble_chunked(design, workers)
        d = design.sizes.astype(np.float64) + lam
    xtx = _mirror_upper(upper)
    for name, arr in (("X'X", xtx), ("Z'X", g), ("Z'Y", u), ("X'Y", w), ("d", d)):
        if not np.isfinite(arr).all():
            raise NonFiniteAccumulationError(f"{name} overflowed during accumulation")
    return HendersonBlocks(xtx=xtx, g=np.ascontiguousarray(g), u=u, w=w, d=d)


def _assemble_chunked(design: GroupedDesign, workers: int):
    bounds = np.linspace(0, design.n, min(workers, design.n) + 1).astype(int)
    chunks = []
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        start = design.offsets[lo]
        stop = design.offsets[hi] if hi < design.n else design.n_obs
        chunks.append((start, stop, design.offsets[lo:hi] - start))

    def work(chunk):
        start, stop, offs = chunk
        return _partial_stats(design.X[start:stop], design.y[start:stop], offs)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(work, chunks))

    # fixed-order reduction keeps the result deterministic
    upper = parts[0][0].copy()
    w = parts[0][3].copy()
    for part in parts[1:]:
        upper += part[0]
        w += part[3]
    g = np.vstack([part[1] for part in parts])
    u = np.concatenate([part[2] for part in parts])
    return upper, g, u, w
