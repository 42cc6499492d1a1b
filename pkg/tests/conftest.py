import numpy as np
import pytest

from fastmme import GroupedDesign


def random_design(rng, n, m, p, unbalanced=False):
    """Standard-normal design; with ``unbalanced`` group sizes vary in 1..m."""
    sizes = rng.integers(1, m + 1, size=n) if unbalanced else np.full(n, m)
    N = int(sizes.sum())
    return GroupedDesign(rng.standard_normal((N, p)), rng.standard_normal(N), sizes)


def explicit_z(sizes):
    """Independent Z construction for oracle checks (loops, no numpy tricks)."""
    N = int(sum(sizes))
    Z = np.zeros((N, len(sizes)))
    row = 0
    for i, mi in enumerate(sizes):
        for _ in range(mi):
            Z[row, i] = 1.0
            row += 1
    return Z


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


@pytest.fixture
def trivial_design():
    # n=2, m=1, p=1, all ones
    return GroupedDesign.from_groups([(np.ones((1, 1)), [1.0]), (np.ones((1, 1)), [1.0])])
