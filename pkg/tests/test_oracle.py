import csv

import numpy as np
import pytest
from helpers import commensurate_instance, loose_instance

from switchmd import (
    Ball,
    Box,
    GridSpec,
    LinearLoss,
    exhaustive_optimum,
    lower_bound_comparator,
    offline_optimum_dp,
    write_comparator_csv,
)
from switchmd.errors import ResourceLimitError
from switchmd.oracle import comparator_csv_header


def grid_1d(points=3, buckets=8, half=1.0):
    return GridSpec(Ball(1, half), points, buckets)


# ---------------------------------------------------------------------------
# GridSpec
# ---------------------------------------------------------------------------


def test_gridspec_validation():
    with pytest.raises(ValueError):
        GridSpec(Ball(3, 1.0), 5, 4)  # dimension cap
    with pytest.raises(ValueError):
        GridSpec(Ball(1, 1.0), 1, 4)
    with pytest.raises(ValueError):
        GridSpec(Ball(1, 1.0), 5, 0)


def test_gridspec_points_inside_domain():
    grid = GridSpec(Ball(2, 1.0), 5, 4)
    pts = grid.points()
    assert all(np.linalg.norm(p) <= 1.0 + 1e-12 for p in pts)
    assert pts.shape[0] < 25  # corners of the bounding box are masked out


def test_grid_refinement_is_nested():
    grid = grid_1d(points=5)
    fine = grid.refine()
    assert fine.points_per_axis == 9
    coarse_pts = grid.points()[:, 0]
    fine_pts = fine.points()[:, 0]
    assert set(coarse_pts).issubset(set(fine_pts))


# ---------------------------------------------------------------------------
# DP oracle
# ---------------------------------------------------------------------------


def test_zero_budget_forces_constant_path():
    rng = np.random.default_rng(0)
    losses = [LinearLoss(rng.standard_normal(1)) for _ in range(4)]
    grid = grid_1d(points=5)
    comp = offline_optimum_dp(losses, grid, 0.0, 1.0)
    assert np.ptp(comp.points) == 0.0
    pts = grid.points()
    best_static = min(sum(loss.value(p) for loss in losses) for p in pts)
    assert comp.total_cost == pytest.approx(best_static, abs=1e-12)


def test_three_round_worked_instance():
    # grid {-1, 0, 1}, sigma = 1, D = 2, linear coefficients (-1, -1, +1);
    # exhaustive enumeration of all 27 paths gives optimum total -1
    losses = [LinearLoss([-1.0]), LinearLoss([-1.0]), LinearLoss([1.0])]
    grid = grid_1d(points=3, buckets=8)
    dp = offline_optimum_dp(losses, grid, 2.0, 1.0)
    ex = exhaustive_optimum(losses, grid, 2.0, 1.0)
    assert dp.total_cost == -1.0
    assert ex.total_cost == -1.0
    optimal = {(1.0, 1.0, -1.0), (1.0, 1.0, 0.0), (1.0, 1.0, 1.0)}
    assert tuple(dp.points[:, 0]) in optimal
    # documented tie rule: deterministic across reruns
    again = offline_optimum_dp(losses, grid, 2.0, 1.0)
    assert np.array_equal(dp.points, again.points)


def test_exhaustive_single_round_is_pointwise_argmin():
    losses = [LinearLoss([2.0])]
    grid = grid_1d(points=5)
    comp = exhaustive_optimum(losses, grid, 0.0, 1.0)
    assert comp.points[0, 0] == -1.0


def test_dp_equals_exhaustive_on_commensurate_instances():
    rng = np.random.default_rng(42)
    for _ in range(40):
        losses, grid, D, sigma = commensurate_instance(rng)
        dp = offline_optimum_dp(losses, grid, D, sigma)
        ex = exhaustive_optimum(losses, grid, D, sigma)
        assert dp.total_cost == ex.total_cost
        assert dp.path_length <= D + 1e-12


def test_dp_matches_bucket_rule_enumeration_on_loose_instances():
    # same feasibility rule on both sides isolates the DP recursion itself
    rng = np.random.default_rng(43)
    for _ in range(40):
        losses, grid, D, sigma = loose_instance(rng)
        dp = offline_optimum_dp(losses, grid, D, sigma)
        ex = exhaustive_optimum(losses, grid, D, sigma, budget_rule="bucketed")
        assert np.isclose(dp.total_cost, ex.total_cost, rtol=0, atol=1e-9)


def test_dp_is_conservative_against_exact_feasibility():
    rng = np.random.default_rng(44)
    for _ in range(40):
        losses, grid, D, sigma = loose_instance(rng)
        dp = offline_optimum_dp(losses, grid, D, sigma)
        ex = exhaustive_optimum(losses, grid, D, sigma, budget_rule="exact")
        assert dp.total_cost >= ex.total_cost - 1e-9
        assert dp.path_length <= D + 1e-9


def test_sampled_grid_paths_never_beat_the_dp():
    rng = np.random.default_rng(45)
    losses, grid, D, sigma = commensurate_instance(rng)
    T = len(losses)
    dp = offline_optimum_dp(losses, grid, D, sigma)
    pts = grid.points()
    for _ in range(300):
        idx = rng.integers(0, pts.shape[0], size=T)
        path = pts[idx]
        deltas = np.linalg.norm(np.diff(path, axis=0), axis=1)
        if deltas.sum() > D:
            continue
        total = sum(loss.value(p) for loss, p in zip(losses, path)) + np.sum(deltas**sigma)
        assert total >= dp.total_cost - 1e-9


def test_huge_budget_recovers_per_round_argmin():
    # with enough buckets and loss gaps dwarfing movement costs the optimum
    # tracks the per-round minimizer
    rng = np.random.default_rng(46)
    grid = grid_1d(points=5, buckets=8)
    pts = grid.points()[:, 0]
    losses = [LinearLoss([float(rng.choice([-10.0, 10.0]))]) for _ in range(4)]
    D = 8 * grid_1d().domain.diameter()
    dp = offline_optimum_dp(losses, grid, D, 1.0)
    greedy = [pts[np.argmin([loss.value([p]) for p in pts])] for loss in losses]
    np.testing.assert_allclose(dp.points[:, 0], greedy, atol=1e-12)
    ex = exhaustive_optimum(losses, grid, D, 1.0)
    assert dp.total_cost == pytest.approx(ex.total_cost, abs=1e-12)


def test_budget_monotonicity():
    rng = np.random.default_rng(47)
    losses = [LinearLoss(rng.standard_normal(1) * 3) for _ in range(5)]
    grid = grid_1d(points=5, buckets=8)
    totals = [offline_optimum_dp(losses, grid, D, 1.5).total_cost for D in (0.0, 0.5, 1.0, 2.0, 4.0)]
    assert all(b <= a + 1e-12 for a, b in zip(totals, totals[1:]))


def test_bucket_refinement_monotonicity():
    rng = np.random.default_rng(48)
    losses = [LinearLoss(rng.standard_normal(1) * 3) for _ in range(5)]
    for K in (1, 2, 4, 8):
        coarse = offline_optimum_dp(losses, grid_1d(points=5, buckets=K), 1.7, 1.0)
        fine = offline_optimum_dp(losses, grid_1d(points=5, buckets=2 * K), 1.7, 1.0)
        assert fine.total_cost <= coarse.total_cost + 1e-12


def test_grid_refinement_monotonicity():
    rng = np.random.default_rng(49)
    losses = [LinearLoss(rng.standard_normal(1) * 3) for _ in range(4)]
    grid = grid_1d(points=5, buckets=8)
    coarse = offline_optimum_dp(losses, grid, 1.5, 1.0)
    fine = offline_optimum_dp(losses, grid.refine(), 1.5, 1.0)
    assert fine.total_cost <= coarse.total_cost + 1e-12


def test_two_dimensional_dp_matches_enumeration():
    rng = np.random.default_rng(50)
    grid = GridSpec(Ball(2, 1.0), 3, 6)
    losses = [LinearLoss(rng.standard_normal(2)) for _ in range(4)]
    dp = offline_optimum_dp(losses, grid, 1.5, 2.0)
    ex = exhaustive_optimum(losses, grid, 1.5, 2.0, budget_rule="bucketed")
    assert np.isclose(dp.total_cost, ex.total_cost, rtol=0, atol=1e-9)


def test_resource_caps():
    losses = [LinearLoss([1.0]) for _ in range(10)]
    with pytest.raises(ResourceLimitError):
        offline_optimum_dp(losses, grid_1d(points=7, buckets=16), 1.0, 1.0, state_cap=100)
    with pytest.raises(ResourceLimitError):
        exhaustive_optimum(losses, grid_1d(points=7), 1.0, 1.0, path_cap=1000)


def test_dp_rejects_bad_inputs():
    with pytest.raises(ValueError):
        offline_optimum_dp([LinearLoss([1.0])], grid_1d(), -1.0, 1.0)
    with pytest.raises(ValueError):
        offline_optimum_dp([LinearLoss([1.0])], grid_1d(), 1.0, 2.5)
    with pytest.raises(ValueError):
        offline_optimum_dp([], grid_1d(), 1.0, 1.0)


# ---------------------------------------------------------------------------
# Lower-bound block path
# ---------------------------------------------------------------------------


def test_single_block_is_constant():
    v = np.ones((4, 1))
    comp = lower_bound_comparator(v, R=2.0, D=1.0, T=4)
    assert np.ptp(comp.points) == 0.0
    assert comp.path_length == 0.0


def test_two_block_maximizer_matches_enumeration():
    # first half (+1, +1 | -1, -1): the chosen block values must beat every
    # other +-(R/2) assignment on the first-half realized value
    first_half = np.array([1.0, 1.0, -1.0, -1.0])
    v = np.concatenate([first_half, np.array([1.0, -1.0, 1.0, -1.0])])[:, None]
    R = 2.0
    comp = lower_bound_comparator(v, R=R, D=4.0, T=8)
    np.testing.assert_allclose(comp.points[:4, 0], [1.0, 1.0, -1.0, -1.0])
    np.testing.assert_allclose(comp.points[4:, 0], -1.0)  # final block held
    realized = float(np.sum(v[:4, 0] * comp.points[:4, 0]))
    for u1 in (-1.0, 1.0):
        for u2 in (-1.0, 1.0):
            candidate = float(np.sum(first_half * np.array([u1, u1, u2, u2])))
            assert realized >= candidate - 1e-12
    assert comp.path_length <= (2 - 1) * R + 1e-12 <= 4.0 + 1e-12


def test_block_value_identity_in_one_dimension():
    # realized first-half value equals (R/2) * sum of |block sums|
    rng = np.random.default_rng(51)
    T, n_blocks, R = 24, 3, 1.5
    v = rng.choice([-1.0, 1.0], size=(T, 1))
    comp = lower_bound_comparator(v, R=R, D=n_blocks * R, T=T, n_blocks=n_blocks)
    half = T // 2
    edges = np.linspace(0, half, n_blocks + 1).round().astype(int)
    block_sums = [abs(v[a:b, 0].sum()) for a, b in zip(edges, edges[1:])]
    realized = float(np.sum(v[:half, 0] * comp.points[:half, 0]))
    assert realized == pytest.approx((R / 2) * sum(block_sums), abs=1e-9)


def test_lower_bound_rejects_odd_horizon():
    with pytest.raises(ValueError):
        lower_bound_comparator(np.ones((5, 1)), R=1.0, D=1.0, T=5)


# ---------------------------------------------------------------------------
# CSV export
# ---------------------------------------------------------------------------


def test_comparator_csv_schema(tmp_path):
    rng = np.random.default_rng(52)
    losses = [LinearLoss(rng.standard_normal(1)) for _ in range(4)]
    grid = grid_1d(points=5)
    comp = offline_optimum_dp(losses, grid, 1.0, 1.0)
    out = tmp_path / "comparator.csv"
    write_comparator_csv(comp, losses, out)
    with open(out, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == comparator_csv_header(1) == ["round", "y1", "step_length", "cum_length", "cost"]
    assert len(rows) == 5
    total = sum(float(r[4]) for r in rows[1:])
    assert total == pytest.approx(comp.total_cost, abs=1e-9)
    assert float(rows[4][3]) == pytest.approx(comp.path_length, abs=1e-12)
