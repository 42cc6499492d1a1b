"""Synthetic designs drawn from the random-intercept model."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from .model import GroupedDesign

COVARIATE_LAWS = ("normal", "intercept")


@dataclass(frozen=True)
class SimConfig:
    """Parameters for :func:`simulate`.

    ``m`` may be a single group size or a sequence of ``n`` sizes.
    ``covariate_law`` is ``"normal"`` (all entries standard normal) or
    ``"intercept"`` (first column constant 1, rest standard normal).
    ``noise=False`` zeroes both the random effects and the errors.
    """

    n: int
    m: int | Sequence[int]
    p: int
    beta_true: Sequence[float] | None = None
    seed: int = 0
    covariate_law: str = "normal"
    noise: bool = True
    sizes: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 1 or self.p < 1:
            raise ValueError("n and p must be positive")
        sizes = np.broadcast_to(np.asarray(self.m, dtype=np.int64), (self.n,)).copy()
        if np.any(sizes < 1):
            raise ValueError("group sizes must be positive")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.covariate_law not in COVARIATE_LAWS:
            raise ValueError(f"covariate_law must be one of {COVARIATE_LAWS}")
        beta = np.zeros(self.p) if self.beta_true is None else np.asarray(self.beta_true, float)
        if beta.shape != (self.p,):
            raise ValueError(f"beta_true must have length {self.p}")
        object.__setattr__(self, "beta_true", tuple(beta.tolist()))
        object.__setattr__(self, "sizes", sizes)


def _group_rng(seed: int, i: int) -> np.random.Generator:
    # one independent stream per group, addressable without drawing the others
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(i,)))


def simulate(config: SimConfig) -> tuple[GroupedDesign, np.ndarray]:
    """Draw a design and its true random effects.

    Each group ``i`` uses its own stream derived from ``(seed, i)``, drawing
    ``v_i``, then the ``m_i x p`` covariates, then the ``m_i`` errors.
    """
    beta = np.asarray(config.beta_true)
    p = config.p
    N = int(config.sizes.sum())
    X = np.empty((N, p))
    y = np.empty(N)
    v = np.empty(config.n)
    lo = 0
    for i, mi in enumerate(config.sizes):
        rng = _group_rng(config.seed, i)
        vi = rng.standard_normal()
        Xi = rng.standard_normal((mi, p))
        eps = rng.standard_normal(mi)
        if config.covariate_law == "intercept":
            Xi[:, 0] = 1.0
        if not config.noise:
            vi = 0.0
            eps[:] = 0.0
        hi = lo + mi
        X[lo:hi] = Xi
        y[lo:hi] = Xi @ beta + vi + eps
        v[i] = vi
        lo = hi
    return GroupedDesign(X, y, config.sizes), v
