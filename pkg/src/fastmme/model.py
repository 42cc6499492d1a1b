"""Core data types for the random-intercept linear mixed model.

The model is ``Y_ij = x_ij' beta + v_i + e_ij`` for groups ``i = 1..n`` and
observations ``j = 1..m_i`` within each group. Designs are stored stacked
(group-major) so that the solver never needs the incidence matrix ``Z``.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np


class MMEError(Exception):
    """Base class for all errors raised by this package."""


class DesignError(MMEError, ValueError):
    """A design violates one of its structural invariants."""


class DimensionMismatchError(DesignError):
    """A group's covariate block or response has the wrong shape.

    ``group`` is the 1-based index of the offending group.
    """

    def __init__(self, message: str, group: int | None = None):
        super().__init__(message)
        self.group = group


class NonFiniteValueError(DesignError):
    """A NaN or infinite entry was found in the design.

    ``location`` is ``(group, row, column)``, all 1-based. ``column`` is
    ``None`` when the offending entry is a response.
    """

    def __init__(self, message: str, location: tuple[int, int, int | None]):
        super().__init__(message)
        self.location = location

    @property
    def group(self) -> int:
        return self.location[0]


class NonFiniteAccumulationError(MMEError, FloatingPointError):
    """Accumulated sufficient statistics overflowed to a non-finite value."""


class StageOrderError(MMEError, RuntimeError):
    """An elimination stage was applied out of order."""


class SingularSystemError(MMEError, np.linalg.LinAlgError):
    """The reduced (or dense) system has a vanishing pivot."""


class SizeGuardError(MMEError, ValueError):
    """Problem too large for the dense reference solver."""


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class VarianceRatio:
    """Scalar added to each diagonal entry of ``Z'Z``.

    With error variance ``phi`` and random-effect variance ``sigma_v^2``
    the ratio is ``phi / sigma_v^2``; the default of 1 corresponds to unit
    variances for both.
    """

    value: float = 1.0

    def __post_init__(self):
        value = float(self.value)
        if not np.isfinite(value) or value <= 0:
            raise ValueError(f"variance ratio must be positive and finite, got {self.value!r}")
        object.__setattr__(self, "value", value)

    def __float__(self) -> float:
        return self.value

    @classmethod
    def coerce(cls, ratio: VarianceRatio | float | None) -> VarianceRatio:
        if ratio is None:
            return cls()
        if isinstance(ratio, cls):
            return ratio
        return cls(ratio)


@dataclass(frozen=True, eq=False)
class GroupedDesign:
    """Observations organised by group.

    Parameters
    ----------
    X : (N, p) array
        Covariate rows of all groups stacked group-major.
    y : (N,) array
        Responses in the same order.
    sizes : (n,) int array
        Number of observations in each group; ``sum(sizes) == N``.

    Instances are immutable and validated on construction. Use
    :meth:`from_groups` to build one from per-group blocks.
    """

    X: np.ndarray
    y: np.ndarray
    sizes: np.ndarray
    offsets: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        X = np.array(self.X, dtype=np.float64, copy=True)
        y = np.array(self.y, dtype=np.float64, copy=True)
        sizes = np.array(self.sizes, copy=True)
        if sizes.ndim != 1 or sizes.size == 0:
            raise DesignError("a design needs at least one group")
        if not np.issubdtype(sizes.dtype, np.integer):
            if not np.all(np.equal(np.mod(sizes, 1), 0)):
                raise DesignError("group sizes must be integers")
        sizes = sizes.astype(np.int64)
        if X.ndim != 2:
            raise DimensionMismatchError(f"X must be 2-D, got shape {X.shape}")
        if X.shape[1] < 1:
            raise DimensionMismatchError("design needs at least one covariate column")
        if y.ndim != 1 or y.shape[0] != X.shape[0]:
            raise DimensionMismatchError(
                f"y has shape {y.shape}, expected ({X.shape[0]},)"
            )
        bad = np.flatnonzero(sizes < 1)
        if bad.size:
            raise DimensionMismatchError(
                f"group {bad[0] + 1} has no observations", group=int(bad[0]) + 1
            )
        if sizes.sum() != X.shape[0]:
            raise DimensionMismatchError(
                f"group sizes sum to {sizes.sum()} but there are {X.shape[0]} rows"
            )
        offsets = np.zeros(sizes.size, dtype=np.int64)
        np.cumsum(sizes[:-1], out=offsets[1:])
        object.__setattr__(self, "X", _readonly(X))
        object.__setattr__(self, "y", _readonly(y))
        object.__setattr__(self, "sizes", _readonly(sizes))
        object.__setattr__(self, "offsets", _readonly(offsets))
        _check_finite(self)

    @classmethod
    def from_groups(cls, groups: Iterable[tuple[np.ndarray, np.ndarray]]) -> GroupedDesign:
        """Build a design from an ordered sequence of ``(X_i, Y_i)`` pairs."""
        blocks, responses, sizes = [], [], []
        p = None
        for i, (Xi, Yi) in enumerate(groups, start=1):
            Xi = np.asarray(Xi, dtype=np.float64)
            Yi = np.asarray(Yi, dtype=np.float64)
            if Xi.ndim == 1:
                Xi = Xi[:, None]
            if Xi.ndim != 2:
                raise DimensionMismatchError(f"group {i}: covariate block must be 2-D", group=i)
            if p is None:
                p = Xi.shape[1]
            if Xi.shape[1] != p:
                raise DimensionMismatchError(
                    f"group {i}: covariate block has {Xi.shape[1]} columns, expected {p}",
                    group=i,
                )
            if Yi.ndim != 1 or Yi.shape[0] != Xi.shape[0]:
                raise DimensionMismatchError(
                    f"group {i}: response has shape {Yi.shape}, expected ({Xi.shape[0]},)",
                    group=i,
                )
            if Xi.shape[0] < 1:
                raise DimensionMismatchError(f"group {i} has no observations", group=i)
            blocks.append(Xi)
            responses.append(Yi)
            sizes.append(Xi.shape[0])
        if not blocks:
            raise DesignError("a design needs at least one group")
        return cls(np.vstack(blocks), np.concatenate(responses), np.asarray(sizes))

    @classmethod
    def balanced(cls, X: np.ndarray, y: np.ndarray, m: int) -> GroupedDesign:
        """Stacked design in which every group has ``m`` consecutive rows."""
        X = np.asarray(X)
        if m < 1 or X.shape[0] % m:
            raise DimensionMismatchError(f"{X.shape[0]} rows cannot be split into groups of {m}")
        return cls(X, y, np.full(X.shape[0] // m, m))

    @property
    def n(self) -> int:
        return int(self.sizes.size)

    @property
    def p(self) -> int:
        return int(self.X.shape[1])

    @property
    def n_obs(self) -> int:
        return int(self.X.shape[0])

    @property
    def is_balanced(self) -> bool:
        return bool(np.all(self.sizes == self.sizes[0]))

    @property
    def m(self) -> int | None:
        """Common group size, or ``None`` for an unbalanced design."""
        return int(self.sizes[0]) if self.is_balanced else None

    def group(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(X_i, Y_i)`` for the 0-based group index ``i``."""
        lo = self.offsets[i]
        hi = lo + self.sizes[i]
        return self.X[lo:hi], self.y[lo:hi]

    @property
    def groups(self) -> list[tuple[np.ndarray, np.ndarray]]:
        return [self.group(i) for i in range(self.n)]

    def group_index(self) -> np.ndarray:
        """0-based group index of every stacked observation."""
        return np.repeat(np.arange(self.n), self.sizes)

    def permute_groups(self, order: Sequence[int]) -> GroupedDesign:
        order = np.asarray(order)
        return GroupedDesign.from_groups(self.group(i) for i in order)

    def __eq__(self, other):
        if not isinstance(other, GroupedDesign):
            return NotImplemented
        return (
            np.array_equal(self.sizes, other.sizes)
            and np.array_equal(self.X, other.X)
            and np.array_equal(self.y, other.y)
        )

    __hash__ = None


def _check_finite(design: GroupedDesign) -> None:
    if np.isfinite(design.X).all() and np.isfinite(design.y).all():
        return
    gidx = design.group_index()
    bad_x = np.argwhere(~np.isfinite(design.X))
    bad_y = np.flatnonzero(~np.isfinite(design.y))
    # report the earliest offending observation
    first_x = bad_x[0, 0] if bad_x.size else design.n_obs
    first_y = bad_y[0] if bad_y.size else design.n_obs
    if first_x <= first_y:
        row, col = int(bad_x[0, 0]), int(bad_x[0, 1])
        g = int(gidx[row])
        loc = (g + 1, row - int(design.offsets[g]) + 1, col + 1)
        what = f"X_{loc[0]}[{loc[1]}, {loc[2]}]"
    else:
        row = int(first_y)
        g = int(gidx[row])
        loc = (g + 1, row - int(design.offsets[g]) + 1, None)
        what = f"Y_{loc[0]}[{loc[1]}]"
    raise NonFiniteValueError(f"non-finite value in group {loc[0]}: {what}", loc)


def validate_design(design: GroupedDesign) -> GroupedDesign:
    """Check every design invariant and return the design unchanged.

    Construction already enforces the invariants, so this is a cheap
    re-check for designs handed across an API boundary.
    """
    if not isinstance(design, GroupedDesign):
        raise TypeError(f"expected GroupedDesign, got {type(design).__name__}")
    if design.X.ndim != 2 or design.y.shape != (design.X.shape[0],):
        raise DimensionMismatchError("stacked arrays have inconsistent shapes")
    if design.sizes.sum() != design.n_obs or np.any(design.sizes < 1):
        raise DimensionMismatchError("group sizes are inconsistent with the stacked rows")
    _check_finite(design)
    return design


@dataclass(frozen=True)
class MixedSolution:
    """Fixed-effect estimates and random-effect predictions.

    ``residual_inf_norm`` is the max-norm of ``A delta - c`` evaluated from
    the sufficient statistics after the solve.
    """

    beta: np.ndarray
    v: np.ndarray
    residual_inf_norm: float
    wall_time_seconds: float

    @property
    def delta(self) -> np.ndarray:
        return np.concatenate([self.beta, self.v])
