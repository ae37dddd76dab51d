"""Brute-force offline optimum under a path-length budget.

The comparator is the cheapest offline sequence y_1..y_T whose total
movement sum ||y_{t+1} - y_t|| stays within the budget D, where each round
pays f_t(y_t) plus ||y_{t+1} - y_t||^sigma for movement. It is computed by
dynamic programming over a uniform grid with the consumed length tracked
in K uniform buckets spanning [0, D]; each step's length is rounded UP to
whole buckets, so no over-budget path is ever accepted (at the price of
rejecting some feasible ones when step lengths and the bucket width are
incommensurate). An exhaustive enumerator over all grid paths validates
the DP on small instances.

States are (round, grid cell, buckets consumed); ties are broken toward
the lowest flattened (cell, bucket) index, scanning cells first. On 1-D
grids the transition metric is canonicalized per index gap so the shifted
vector updates and the backtracking pass see bitwise-identical costs.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import ResourceLimitError

DEFAULT_STATE_CAP = 100_000_000
EXHAUSTIVE_PATH_CAP = 10_000_000

# absorbs float noise when a step length is an exact multiple of the bucket width
_BUCKET_EPS = 1e-12


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid over a 1-D or 2-D domain plus the budget discretization."""

    domain: object
    points_per_axis: int
    budget_buckets: int

    def __post_init__(self):
        if self.domain.dimension not in (1, 2):
            raise ValueError("the oracle supports dimensions 1 and 2 only")
        if self.points_per_axis < 2:
            raise ValueError("need at least 2 grid points per axis")
        if self.budget_buckets < 1:
            raise ValueError("need at least 1 budget bucket")

    @property
    def dimension(self) -> int:
        return self.domain.dimension

    def points(self) -> np.ndarray:
        """Grid points inside the domain, ordered by flattened axis index."""
        axes = [np.linspace(lo, hi, self.points_per_axis) for lo, hi in self.domain.axis_bounds()]
        if self.dimension == 1:
            pts = axes[0][:, None]
        else:
            xx, yy = np.meshgrid(axes[0], axes[1], indexing="ij")
            pts = np.column_stack([xx.ravel(), yy.ravel()])
        keep = np.array([self.domain.contains(p) for p in pts])
        return pts[keep]

    def refine(self) -> "GridSpec":
        """Nested refinement: 2m - 1 points per axis keeps every old point."""
        return GridSpec(self.domain, 2 * self.points_per_axis - 1, self.budget_buckets)


@dataclass(frozen=True)
class ComparatorPath:
    """An offline path with its exact length and total cost."""

    points: np.ndarray  # (T, d)
    path_length: float
    operating_total: float
    switching_total: float
    budget_D: float
    sigma: float

    @property
    def horizon(self) -> int:
        return self.points.shape[0]

    @property
    def total_cost(self) -> float:
        return self.operating_total + self.switching_total


def _losses_on_grid(losses, pts: np.ndarray) -> np.ndarray:
    return np.stack([loss.values(pts) for loss in losses])


def _bucket_steps(dist: np.ndarray, D: float, K: int) -> np.ndarray:
    """Buckets consumed per step, rounded up; unaffordable steps get K + 1."""
    if D == 0:
        return np.where(dist <= _BUCKET_EPS, 0, K + 1)
    width = D / K
    return np.maximum(np.ceil(dist / width - _BUCKET_EPS), 0).astype(np.int64)


def _path_stats(points: np.ndarray, losses, sigma: float) -> tuple[float, float, float]:
    deltas = np.linalg.norm(np.diff(points, axis=0), axis=1)
    operating = float(sum(loss.value(p) for loss, p in zip(losses, points)))
    return float(deltas.sum()), operating, float(np.sum(deltas**sigma))


def _forward_1d_numpy(loss_grid, cost_d, steps_d, K):
    """Shift-based forward pass for 1-D grids; O(n) vector ops per round."""
    T, n = loss_grid.shape
    history = np.full((T, n, K + 1), np.inf)
    dp = history[0]
    dp[:, 0] = loss_grid[0]
    for t in range(1, T):
        best = history[t]
        np.add(dp, cost_d[0], out=best)  # zero-movement transition
        for delta in range(1, n):
            inc = steps_d[delta]
            if inc > K:
                continue
            c = cost_d[delta]
            src = dp[: n - delta, : K + 1 - inc] + c
            np.minimum(best[delta:, inc:], src, out=best[delta:, inc:])
            src = dp[delta:, : K + 1 - inc] + c
            np.minimum(best[: n - delta, inc:], src, out=best[: n - delta, inc:])
        best += loss_grid[t][:, None]
        dp = best
    return history


try:
    import numba

    @numba.njit(cache=True)
    def _forward_1d_kernel(loss_grid, cost_d, steps_d, K, history):  # pragma: no cover
        T, n = loss_grid.shape
        for j in range(n):
            history[0, j, 0] = loss_grid[0, j]
        for t in range(1, T):
            dp = history[t - 1]
            best = history[t]
            for j in range(n):
                for b in range(K + 1):
                    best[j, b] = dp[j, b] + cost_d[0]
            for delta in range(1, n):
                inc = steps_d[delta]
                if inc > K:
                    continue
                c = cost_d[delta]
                for j in range(n - delta):
                    for b in range(K + 1 - inc):
                        v = dp[j, b] + c
                        if v < best[j + delta, b + inc]:
                            best[j + delta, b + inc] = v
                        v2 = dp[j + delta, b] + c
                        if v2 < best[j, b + inc]:
                            best[j, b + inc] = v2
            for j in range(n):
                lv = loss_grid[t, j]
                for b in range(K + 1):
                    best[j, b] += lv

    def _forward_1d(loss_grid, cost_d, steps_d, K):
        T, n = loss_grid.shape
        history = np.full((T, n, K + 1), np.inf)
        _forward_1d_kernel(loss_grid, cost_d, steps_d, K, history)
        return history

except ImportError:  # pragma: no cover
    _forward_1d = _forward_1d_numpy


def _forward_general(loss_grid, move_cost, steps, K):
    """Generic forward pass grouping destinations by bucket increment."""
    T, n = loss_grid.shape
    history = np.full((T, n, K + 1), np.inf)
    dp = history[0]
    dp[:, 0] = loss_grid[0]
    for t in range(1, T):
        best = history[t]
        for j in range(n):
            for jp in range(n):
                inc = steps[j, jp]
                if inc > K:
                    continue
                cand = dp[j, : K + 1 - inc] + move_cost[j, jp]
                np.minimum(best[jp, inc:], cand, out=best[jp, inc:])
        best += loss_grid[t][:, None]
        dp = best
    return history


def offline_optimum_dp(
    losses,
    grid: GridSpec,
    D: float,
    sigma: float,
    state_cap: int = DEFAULT_STATE_CAP,
) -> ComparatorPath:
    """Minimum-cost grid path whose bucket-rounded length fits the budget."""
    if D < 0:
        raise ValueError("budget must be nonnegative")
    if not 1.0 <= sigma <= 2.0:
        raise ValueError("sigma must lie in [1, 2]")
    losses = list(losses)
    T = len(losses)
    if T < 1:
        raise ValueError("need at least one round")
    pts = grid.points()
    n, K = pts.shape[0], grid.budget_buckets
    if n * (K + 1) * T > state_cap:
        raise ResourceLimitError(
            f"{n * (K + 1) * T} DP states exceed the cap of {state_cap}; "
            "reduce the grid, buckets, or horizon"
        )

    loss_grid = _losses_on_grid(losses, pts)  # (T, n)
    if grid.dimension == 1:
        dist_d = pts[:, 0] - pts[0, 0]  # canonical distance per index gap
        cost_d = dist_d**sigma
        steps_d = _bucket_steps(dist_d, D, K)
        history = _forward_1d(loss_grid, cost_d, steps_d, K)
        gaps = np.abs(np.arange(n)[:, None] - np.arange(n)[None, :])
        move_cost = cost_d[gaps]
        steps = steps_d[gaps]
    else:
        dist = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2)
        move_cost = dist**sigma
        steps = _bucket_steps(dist, D, K)
        history = _forward_general(loss_grid, move_cost, steps, K)

    final = history[-1]
    flat = int(np.argmin(final))
    if not np.isfinite(final.flat[flat]):
        raise AssertionError("no feasible path; the constant path should always fit")
    j, b = divmod(flat, K + 1)
    idx = [j]
    for t in range(T - 1, 0, -1):
        target = history[t][j, b]
        prev = history[t - 1]
        bprev = b - steps[:, j]
        valid = np.nonzero(bprev >= 0)[0]
        cand = prev[valid, bprev[valid]] + move_cost[valid, j] + loss_grid[t][j]
        hits = np.nonzero(cand == target)[0]
        assert hits.size > 0, "backtracking lost the optimal path"
        jprev = int(valid[hits[0]])  # lowest cell index wins ties
        b = int(b - steps[jprev, j])
        j = jprev
        idx.append(j)
    idx.reverse()
    points = pts[idx]
    length, operating, sw = _path_stats(points, losses, sigma)
    return ComparatorPath(
        points=points,
        path_length=length,
        operating_total=operating,
        switching_total=sw,
        budget_D=float(D),
        sigma=float(sigma),
    )


def exhaustive_optimum(
    losses,
    grid: GridSpec,
    D: float,
    sigma: float,
    budget_rule: str = "exact",
    path_cap: int = EXHAUSTIVE_PATH_CAP,
) -> ComparatorPath:
    """Cheapest grid path found by enumerating every candidate.

    ``budget_rule='exact'`` filters by the true path length; ``'bucketed'``
    applies the DP's rounded-bucket feasibility instead, which makes the
    enumerator a drop-in differential oracle for the DP on any instance.
    """
    if budget_rule not in ("exact", "bucketed"):
        raise ValueError("budget_rule must be 'exact' or 'bucketed'")
    if not 1.0 <= sigma <= 2.0:
        raise ValueError("sigma must lie in [1, 2]")
    losses = list(losses)
    T = len(losses)
    pts = grid.points()
    n = pts.shape[0]
    if n**T > path_cap:
        raise ResourceLimitError(f"{n}^{T} paths exceed the cap of {path_cap}")

    loss_grid = _losses_on_grid(losses, pts)  # (T, n)
    dist = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2)

    paths = np.indices((n,) * T).reshape(T, -1).T  # lexicographic order
    operating = loss_grid[np.arange(T)[None, :], paths].sum(axis=1)
    if T > 1:
        src, dst = paths[:, :-1], paths[:, 1:]
        seg = dist[src, dst]
        lengths = seg.sum(axis=1)
        sw = (seg**sigma).sum(axis=1)
        if budget_rule == "exact":
            feasible = lengths <= D + _BUCKET_EPS
        else:
            K = grid.budget_buckets
            feasible = _bucket_steps(seg, D, K).sum(axis=1) <= K
    else:
        sw = np.zeros(paths.shape[0])
        feasible = np.ones(paths.shape[0], dtype=bool)

    totals = np.where(feasible, operating + sw, np.inf)
    best = int(np.argmin(totals))  # first minimum = lexicographically smallest path
    points = pts[paths[best]]
    length, op, swc = _path_stats(points, losses, sigma)
    return ComparatorPath(
        points=points,
        path_length=length,
        operating_total=op,
        switching_total=swc,
        budget_D=float(D),
        sigma=float(sigma),
    )


def lower_bound_comparator(
    v_stream: np.ndarray, R: float, D: float, T: int, n_blocks: int | None = None
) -> ComparatorPath:
    """Adversarial block-piecewise-constant path for sign-vector streams.

    The first T/2 rounds are split into N = min(D/R, T/2) consecutive
    blocks; block i holds the constant u_i of norm R/2 aligned with the
    block's coefficient sum (the value maximizer), and the final block's
    value is held over the last T/2 rounds. Total movement is at most
    (N - 1) R <= D.
    """
    if T % 2 != 0:
        raise ValueError("T must be even")
    if R <= 0:
        raise ValueError("R must be positive")
    v = np.asarray(v_stream, dtype=np.float64)
    if v.ndim == 1:
        v = v[:, None]
    if v.shape[0] != T:
        raise ValueError("stream length must equal T")
    half = T // 2
    if n_blocks is None:
        n_blocks = max(1, int(min(D / R, half)))
    if not 1 <= n_blocks <= half:
        raise ValueError("block count must lie in [1, T/2]")

    edges = np.linspace(0, half, n_blocks + 1).round().astype(int)
    points = np.empty((T, v.shape[1]))
    for i in range(n_blocks):
        seg = v[edges[i] : edges[i + 1]]
        s = seg.sum(axis=0)
        norm = np.linalg.norm(s)
        u = (R / 2.0) * (s / norm) if norm > 0 else np.zeros(v.shape[1])
        points[edges[i] : edges[i + 1]] = u
    points[half:] = points[half - 1]

    deltas = np.linalg.norm(np.diff(points, axis=0), axis=1)
    length = float(deltas.sum())
    if length > (n_blocks - 1) * R + 1e-9 or (n_blocks - 1) * R > D + 1e-9:
        raise AssertionError("block path exceeds its movement budget")
    operating = float(np.sum(v * points))
    return ComparatorPath(
        points=points,
        path_length=length,
        operating_total=operating,
        switching_total=float(deltas.sum()),
        budget_D=float(D),
        sigma=1.0,
    )


def comparator_csv_header(dimension: int) -> list[str]:
    coords = [f"y{i + 1}" for i in range(dimension)]
    return ["round", *coords, "step_length", "cum_length", "cost"]


def write_comparator_csv(path_obj: ComparatorPath, losses, out_path) -> None:
    """Rows: round, coordinates, step into the round, running length, round cost."""
    pts = path_obj.points
    T, d = pts.shape
    steps = np.zeros(T)
    steps[1:] = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    cum = np.cumsum(steps)
    with open(out_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(comparator_csv_header(d))
        for t in range(T):
            cost = losses[t].value(pts[t]) + steps[t] ** path_obj.sigma
            writer.writerow(
                [
                    t + 1,
                    *[repr(float(c)) for c in pts[t]],
                    repr(float(steps[t])),
                    repr(float(cum[t])),
                    repr(float(cost)),
                ]
            )
