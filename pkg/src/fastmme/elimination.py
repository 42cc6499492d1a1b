"""Staged row-operation solver for the mixed model equations.

The augmented system ``D = [A | c]`` is::

    [ X'X   X'Z        | X'Y ]
    [ Z'X   Z'Z + lI   | Z'Y ]

The lower block row never changes. Stage ``k`` clears column ``k`` of the
upper-right block ``X'Z`` by subtracting, from each fixed-effect row ``h``,
``c_h = g[k, h] / d_k`` times lower row ``k``. Only the ``p x p`` block and
the top of the right-hand side are touched, so after all ``n`` stages the
upper block row reads ``[X~ | 0 | c~]`` where ``X~`` is the Schur complement
``X'X - G' diag(1/d) G``. Then ``beta = X~^{-1} c~`` and each random effect
follows from its own lower row.
"""

from __future__ import annotations

import time
import warnings
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .assembly import HendersonBlocks, assemble
from .model import (
    GroupedDesign,
    MixedSolution,
    SingularSystemError,
    StageOrderError,
    VarianceRatio,
)

PIVOT_RTOL = 1e-12


@dataclass
class EliminationState:
    """Upper block row of ``D`` part-way through the elimination.

    ``d11`` starts as ``X'X`` and ``d13`` as ``X'Y``; ``stage`` counts the
    group columns already cleared. After stage ``k``::

        d11 == X'X - sum_{i<=k} g_i g_i' / d_i
        d13 == X'Y - sum_{i<=k} g_i u_i / d_i
    """

    d11: np.ndarray
    d13: np.ndarray
    stage: int
    n_groups: int

    @classmethod
    def initial(cls, blocks: HendersonBlocks) -> EliminationState:
        return cls(
            d11=np.array(blocks.xtx, dtype=np.float64, copy=True),
            d13=np.array(blocks.w, dtype=np.float64, copy=True),
            stage=0,
            n_groups=blocks.n,
        )

    @property
    def complete(self) -> bool:
        return self.stage == self.n_groups


def eliminate_stage(
    state: EliminationState,
    blocks: HendersonBlocks,
    k: int,
    group: int | None = None,
) -> EliminationState:
    """Apply stage ``k`` (1-based) in place and return ``state``.

    By default stage ``k`` clears the column of group ``k - 1`` (0-based).
    Passing ``group`` clears a different column instead, which is how
    :func:`eliminate_all` runs a permuted order; the caller is then
    responsible for touching each group exactly once.
    """
    if state.stage != k - 1 or not 1 <= k <= state.n_groups:
        raise StageOrderError(
            f"cannot apply stage {k} to a state at stage {state.stage} of {state.n_groups}"
        )
    i = k - 1 if group is None else group
    gk = blocks.g[i]
    c = gk / blocks.d[i]
    # row h of d11 loses c[h] * g[i, :]; all h at once is an outer product
    state.d11 -= np.outer(c, gk)
    state.d13 -= c * blocks.u[i]
    state.stage = k
    return state


def eliminate_all(
    blocks: HendersonBlocks, order: Sequence[int] | None = None
) -> EliminationState:
    """Run stages ``1..n``; ``order`` optionally permutes the groups."""
    state = EliminationState.initial(blocks)
    if order is None:
        for k in range(1, blocks.n + 1):
            eliminate_stage(state, blocks, k)
    else:
        order = np.asarray(order)
        if sorted(order.tolist()) != list(range(blocks.n)):
            raise ValueError("order must be a permutation of range(n)")
        for k, i in enumerate(order, start=1):
            eliminate_stage(state, blocks, k, group=int(i))
    return state


def solve_fixed_effects(state: EliminationState) -> np.ndarray:
    """Solve the reduced system ``X~ beta = c~`` by pivoted LU.

    Raises
    ------
    SingularSystemError
        When a pivot falls below ``1e-12 * ||X~||_inf``, i.e. the covariates
        are rank deficient or confounded with the group means.
    """
    if not state.complete:
        raise StageOrderError(
            f"elimination incomplete: stage {state.stage} of {state.n_groups}"
        )
    xt = state.d11
    scale = np.abs(xt).sum(axis=1).max()
    if not np.isfinite(scale):
        raise SingularSystemError("reduced system contains non-finite entries")
    with warnings.catch_warnings():
        # exact zero pivots are reported below as SingularSystemError
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(xt, check_finite=False)
    pivots = np.abs(np.diag(lu))
    bad = np.flatnonzero(pivots <= PIVOT_RTOL * scale)
    if scale == 0 or bad.size:
        col = int(bad[0]) + 1 if bad.size else 1
        raise SingularSystemError(
            f"reduced fixed-effect system is singular (pivot {col} below "
            f"{PIVOT_RTOL:g} * ||X~||_inf); check for collinear covariates or "
            "covariates constant within groups"
        )
    return scipy.linalg.lu_solve((lu, piv), state.d13, check_finite=False)


def back_substitute(blocks: HendersonBlocks, beta: np.ndarray) -> np.ndarray:
    """Random-effect predictions ``v_i = (u_i - g_i . beta) / d_i``."""
    return (blocks.u - blocks.g @ beta) / blocks.d


def solve(
    design: GroupedDesign,
    ratio: VarianceRatio | float = 1.0,
    workers: int | None = None,
) -> MixedSolution:
    """Fit the random-intercept model by staged elimination.

    Assembly, elimination, the reduced solve, back-substitution and the
    residual check are all inside the timed region.

    Examples
    --------
    >>> import numpy as np
    >>> design = GroupedDesign.from_groups([(np.ones((1, 1)), [1.0]), (np.ones((1, 1)), [1.0])])
    >>> sol = solve(design)
    >>> sol.beta, sol.v
    (array([1.]), array([0., 0.]))
    """
    t0 = time.perf_counter()
    blocks = assemble(design, ratio, workers=workers)
    state = eliminate_all(blocks)
    beta = solve_fixed_effects(state)
    v = back_substitute(blocks, beta)
    resid = float(np.abs(blocks.residual(beta, v)).max())
    elapsed = time.perf_counter() - t0
    return MixedSolution(beta=beta, v=v, residual_inf_norm=resid, wall_time_seconds=elapsed)
