import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fastmme import (
    EliminationState,
    GroupedDesign,
    HendersonBlocks,
    SingularSystemError,
    StageOrderError,
    assemble,
    back_substitute,
    dense_assemble,
    dense_solve,
    eliminate_all,
    eliminate_stage,
    solve,
    solve_fixed_effects,
)

from conftest import random_design


def trivial_blocks():
    return HendersonBlocks(
        xtx=np.array([[2.0]]), g=np.array([[1.0], [1.0]]), u=np.array([1.0, 1.0]),
        w=np.array([2.0]), d=np.array([2.0, 2.0]),
    )


def partial_schur(blocks, k, order=None):
    """Direct evaluation of the state after the first k groups."""
    idx = np.arange(blocks.n) if order is None else np.asarray(order)
    idx = idx[:k]
    G, u, d = blocks.g[idx], blocks.u[idx], blocks.d[idx]
    return blocks.xtx - G.T @ (G / d[:, None]), blocks.w - G.T @ (u / d)


def state_from(d11, d13, n):
    return EliminationState(np.array(d11, float), np.array(d13, float), stage=n, n_groups=n)


# --- eliminate_stage -------------------------------------------------------

def test_single_stage_hand_value():
    b = trivial_blocks()
    s = eliminate_stage(EliminationState.initial(b), b, 1)
    # 2 - 1*1/2 = 1.5 for both blocks
    np.testing.assert_array_equal(s.d11, [[1.5]])
    np.testing.assert_array_equal(s.d13, [1.5])
    assert s.stage == 1


def test_zero_group_row_leaves_state():
    b = trivial_blocks()
    b = HendersonBlocks(b.xtx, np.array([[0.0], [1.0]]), b.u, b.w, b.d)
    s = eliminate_stage(EliminationState.initial(b), b, 1)
    np.testing.assert_array_equal(s.d11, [[2.0]])
    np.testing.assert_array_equal(s.d13, [2.0])
    assert s.stage == 1


@pytest.mark.parametrize("k", [0, 2, 3])
def test_stage_out_of_order(k):
    b = trivial_blocks()
    with pytest.raises(StageOrderError):
        eliminate_stage(EliminationState.initial(b), b, k)


def test_full_schur_random_instance(rng):
    b = assemble(random_design(rng, 5, 3, 2))
    s = eliminate_all(b)
    d11, d13 = partial_schur(b, 5)
    np.testing.assert_allclose(s.d11, d11, rtol=1e-12, atol=1e-12 * np.abs(d11).max())
    np.testing.assert_allclose(s.d13, d13, rtol=1e-12, atol=1e-12 * np.abs(d13).max())


def test_partial_schur_every_stage(rng):
    b = assemble(random_design(rng, 12, 4, 4, unbalanced=True), 0.7)
    s = EliminationState.initial(b)
    for k in range(1, b.n + 1):
        eliminate_stage(s, b, k)
        d11, d13 = partial_schur(b, k)
        assert np.abs(s.d11 - d11).max() <= 1e-12 * np.abs(d11).max()
        assert np.abs(s.d13 - d13).max() <= 1e-12 * (1 + np.abs(d13).max())
        assert np.abs(s.d11 - s.d11.T).max() <= 1e-12 * np.abs(s.d11).max()


# --- eliminate_all ---------------------------------------------------------

def test_eliminate_all_trivial():
    s = eliminate_all(trivial_blocks())
    np.testing.assert_array_equal(s.d11, [[1.0]])
    np.testing.assert_array_equal(s.d13, [[1.0]][0])
    assert s.stage == 2


def test_single_group_equals_one_stage(rng):
    b = assemble(random_design(rng, 1, 4, 3))
    one = eliminate_stage(EliminationState.initial(b), b, 1)
    s = eliminate_all(b)
    assert np.array_equal(s.d11, one.d11) and np.array_equal(s.d13, one.d13)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 30), p=st.integers(1, 6))
def test_stage_order_invariance(seed, n, p):
    rng = np.random.default_rng(seed)
    b = assemble(random_design(rng, n, 3, p, unbalanced=True))
    ref = eliminate_all(b)
    perm = eliminate_all(b, order=rng.permutation(n))
    scale = np.abs(ref.d11).max()
    assert np.abs(perm.d11 - ref.d11).max() <= 1e-12 * scale
    assert np.abs(perm.d13 - ref.d13).max() <= 1e-12 * (1 + np.abs(ref.d13).max())


def test_bad_order_rejected():
    with pytest.raises(ValueError):
        eliminate_all(trivial_blocks(), order=[0, 0])


def test_reduced_solution_matches_dense(rng):
    design = random_design(rng, 50, 10, 8)
    beta = solve_fixed_effects(eliminate_all(assemble(design)))
    delta = dense_solve(dense_assemble(design))
    np.testing.assert_allclose(beta, delta[:8], rtol=0, atol=1e-8 * (1 + np.abs(delta).max()))


# --- solve_fixed_effects ---------------------------------------------------

def test_fixed_effects_1x1():
    np.testing.assert_array_equal(solve_fixed_effects(state_from([[1.0]], [1.0], 1)), [1.0])


def test_fixed_effects_identity():
    beta = solve_fixed_effects(state_from(np.eye(2), [3.0, -4.0], 1))
    np.testing.assert_array_equal(beta, [3.0, -4.0])


def test_duplicated_column_is_singular(rng):
    X = rng.standard_normal((20, 1))
    design = GroupedDesign(np.hstack([X, X]), rng.standard_normal(20), np.full(5, 4))
    with pytest.raises(SingularSystemError):
        solve_fixed_effects(eliminate_all(assemble(design)))


def test_fixed_effects_requires_complete_elimination():
    b = trivial_blocks()
    with pytest.raises(StageOrderError):
        solve_fixed_effects(EliminationState.initial(b))


# --- back_substitute -------------------------------------------------------

def test_back_substitute_trivial():
    np.testing.assert_array_equal(back_substitute(trivial_blocks(), np.array([1.0])), [0.0, 0.0])


def test_back_substitute_zero_beta(rng):
    b = assemble(random_design(rng, 6, 3, 2))
    assert np.array_equal(back_substitute(b, np.zeros(2)), b.u / b.d)


def test_back_substitute_matches_dense(rng):
    design = random_design(rng, 20, 5, 4)
    b = assemble(design)
    v = back_substitute(b, solve_fixed_effects(eliminate_all(b)))
    delta = dense_solve(dense_assemble(design))
    np.testing.assert_allclose(v, delta[4:], rtol=1e-8, atol=1e-12)


# --- solve -----------------------------------------------------------------

def test_solve_trivial(trivial_design):
    sol = solve(trivial_design)
    np.testing.assert_allclose(sol.beta, [1.0], atol=1e-15)
    np.testing.assert_allclose(sol.v, [0.0, 0.0], atol=1e-15)
    assert sol.residual_inf_norm <= 1e-14
    assert sol.wall_time_seconds > 0


def test_solve_zero_response(rng):
    d = random_design(rng, 7, 3, 3)
    sol = solve(GroupedDesign(d.X, np.zeros(d.n_obs), d.sizes))
    assert np.array_equal(sol.beta, np.zeros(3))
    assert np.array_equal(sol.v, np.zeros(7))


@pytest.mark.parametrize("unbalanced", [False, True])
def test_solve_matches_dense(rng, unbalanced):
    design = random_design(rng, 50, 10, 8, unbalanced)
    sol = solve(design, 1.0)
    delta = dense_solve(dense_assemble(design, 1.0))
    assert np.abs(sol.delta - delta).max() <= 1e-8 * (1 + np.abs(delta).max())


def test_second_block_row_identity(rng):
    design = random_design(rng, 30, 4, 5, unbalanced=True)
    sol = solve(design, 2.5)
    b = assemble(design, 2.5)
    lhs = b.g @ sol.beta + b.d * sol.v
    assert np.abs(lhs - b.u).max() <= 1e-10 * (1 + np.abs(b.u).max())


def test_residual_recomputed(rng):
    design = random_design(rng, 25, 3, 4)
    sol = solve(design)
    b = assemble(design)
    assert sol.residual_inf_norm == pytest.approx(np.abs(b.residual(sol.beta, sol.v)).max(), abs=0)
    assert sol.residual_inf_norm <= 1e-8 * (1 + np.abs(b.rhs()).max())


def test_solution_finite(rng):
    sol = solve(random_design(rng, 40, 5, 6))
    assert np.isfinite(sol.beta).all() and np.isfinite(sol.v).all()


def test_covariate_constant_within_groups_is_still_identified(rng):
    # with lambda > 0 a group-level covariate is shrunk, not confounded
    n, m = 10, 3
    z = np.repeat(rng.standard_normal(n), m)
    design = GroupedDesign(np.column_stack([np.ones(n * m), z]), rng.standard_normal(n * m), np.full(n, m))
    sol = solve(design)
    delta = dense_solve(dense_assemble(design))
    np.testing.assert_allclose(sol.delta, delta, atol=1e-8)


def test_large_lambda_shrinks_to_ols(rng):
    design = random_design(rng, 40, 5, 3)
    sol = solve(design, 1e12)
    ols = np.linalg.lstsq(design.X, design.y, rcond=None)[0]
    assert np.abs(sol.v).max() <= 1e-6
    assert np.abs(sol.beta - ols).max() <= 1e-6 * np.abs(ols).max()
