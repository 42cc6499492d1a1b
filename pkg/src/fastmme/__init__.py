"""Fast solver for Henderson's mixed model equations (random intercepts).

The incidence matrix ``Z`` is never formed and the full ``(p+n)``-order
system is never factorised: groups are eliminated one at a time from the
fixed-effect block, leaving a ``p x p`` system.
"""

from . import bench
from .assembly import HendersonBlocks, assemble
from .dense import DenseSystem, dense_assemble, dense_solve
from .elimination import (
    EliminationState,
    back_substitute,
    eliminate_all,
    eliminate_stage,
    solve,
    solve_fixed_effects,
)
from .model import (
    DesignError,
    DimensionMismatchError,
    GroupedDesign,
    MixedSolution,
    MMEError,
    NonFiniteAccumulationError,
    NonFiniteValueError,
    SingularSystemError,
    SizeGuardError,
    StageOrderError,
    VarianceRatio,
    validate_design,
)
from .simulate import SimConfig, simulate

__version__ = "0.1.0"
