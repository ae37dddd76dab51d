"""Shared instance generators for oracle differential tests.

Commensurate instances make the DP's bucket arithmetic exact: grid points
sit at binary-fraction coordinates, the bucket width divides the grid
spacing, and the budget is an exact multiple of the bucket width. On such
instances the DP's feasible set coincides with exact path-length
feasibility, so the DP and the exhaustive enumerator must agree exactly.
"""

import numpy as np

from switchmd import Box, GridSpec, LinearLoss, LogisticLoss

SPACINGS = (0.25, 0.5, 1.0)
WIDTH_FACTORS = (0.25, 0.5, 1.0)  # bucket width = factor * spacing divides every step
SIGMAS = (1.0, 1.5, 2.0)


def commensurate_instance(rng: np.random.Generator):
    """Random 1-D instance (losses, grid, D, sigma) with exact bucket math."""
    m = int(rng.integers(2, 8))
    spacing = float(rng.choice(SPACINGS))
    half = spacing * (m - 1) / 2.0
    domain = Box([-half], [half])
    grid = GridSpec(domain, m, int(rng.integers(1, 17)))
    width = spacing * float(rng.choice(WIDTH_FACTORS))
    D = grid.budget_buckets * width
    T = int(rng.integers(1, 6))
    sigma = float(rng.choice(SIGMAS))
    losses = []
    for _ in range(T):
        if rng.random() < 0.25:
            losses.append(LogisticLoss(rng.uniform(-2, 2, 1), int(rng.choice([-1, 1]))))
        else:
            losses.append(LinearLoss(rng.standard_normal(1) * 2))
    return losses, grid, D, sigma


def loose_instance(rng: np.random.Generator):
    """Random 1-D instance with no commensurability guarantees."""
    from switchmd import Ball

    m = int(rng.integers(2, 8))
    domain = Ball(1, float(rng.uniform(0.5, 2.0)))
    grid = GridSpec(domain, m, int(rng.integers(1, 17)))
    D = float(rng.uniform(0.0, 3.0))
    T = int(rng.integers(1, 6))
    sigma = float(rng.choice(SIGMAS))
    losses = [LinearLoss(rng.standard_normal(1) * 2) for _ in range(T)]
    return losses, grid, D, sigma
