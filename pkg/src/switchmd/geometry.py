"""Feasible domains, mirror maps, Bregman divergences, and the mirror step.

Decisions are plain float64 numpy vectors. A :class:`Domain` knows how to
test membership, project onto itself, and report the geometric constants
(diameter, largest norm) that the rate formulas consume. A mirror map
supplies the distance-generating function, its gradient, and a strong
convexity modulus; together they define the proximal subproblem

    argmin_{x in X}  <g, x - x_ref> + (1/lam) * B(x, x_ref)

solved by :func:`mirror_argmin`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalError

__all__ = [
    "Ball",
    "Box",
    "Simplex",
    "SquaredEuclideanMap",
    "NegativeEntropyMap",
    "bregman_divergence",
    "mirror_argmin",
    "mirror_argmin_pgd",
]

_MEMBERSHIP_TOL = 1e-9


def _as_vector(x, name: str = "x") -> np.ndarray:
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1:
        raise ValueError(f"{name} must be a 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} has non-finite entries")
    return v


# ---------------------------------------------------------------------------
# Domains
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Ball:
    """Euclidean ball of the given radius centred at the origin."""

    dimension: int
    radius: float

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        if self.radius <= 0:
            raise ValueError("radius must be positive")

    def contains(self, x, tol: float = _MEMBERSHIP_TOL) -> bool:
        v = np.asarray(x, dtype=np.float64)
        return v.shape == (self.dimension,) and bool(
            np.all(np.isfinite(v)) and np.linalg.norm(v) <= self.radius + tol
        )

    def project(self, x) -> np.ndarray:
        """Scale onto the ball: x * min(1, radius/||x||); boundary points pass through."""
        v = _as_vector(x)
        n = np.linalg.norm(v)
        if n <= self.radius:
            return v
        return v * (self.radius / n)

    def center(self) -> np.ndarray:
        return np.zeros(self.dimension)

    def diameter(self) -> float:
        return 2.0 * self.radius

    def max_norm(self) -> float:
        return self.radius

    def axis_bounds(self) -> list[tuple[float, float]]:
        return [(-self.radius, self.radius)] * self.dimension

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Uniform sample from the ball (direction x scaled radius)."""
        g = rng.standard_normal((n, self.dimension))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        r = self.radius * rng.random(n) ** (1.0 / self.dimension)
        return g * r[:, None]


@dataclass(frozen=True)
class Box:
    """Axis-aligned box [lower, upper]; must contain the origin so x0 = 0 is feasible."""

    lower: np.ndarray
    upper: np.ndarray

    def __init__(self, lower, upper):
        lo = np.asarray(lower, dtype=np.float64)
        hi = np.asarray(upper, dtype=np.float64)
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ValueError("lower and upper must be 1-D vectors of equal length")
        if np.any(lo >= hi):
            raise ValueError("lower must be strictly below upper")
        if np.any(lo > 0) or np.any(hi < 0):
            raise ValueError("box must contain the origin")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dimension(self) -> int:
        return self.lower.shape[0]

    def contains(self, x, tol: float = _MEMBERSHIP_TOL) -> bool:
        v = np.asarray(x, dtype=np.float64)
        return v.shape == (self.dimension,) and bool(
            np.all(np.isfinite(v))
            and np.all(v >= self.lower - tol)
            and np.all(v <= self.upper + tol)
        )

    def project(self, x) -> np.ndarray:
        return np.clip(_as_vector(x), self.lower, self.upper)

    def center(self) -> np.ndarray:
        return np.zeros(self.dimension)

    def diameter(self) -> float:
        return float(np.linalg.norm(self.upper - self.lower))

    def max_norm(self) -> float:
        return float(np.linalg.norm(np.maximum(np.abs(self.lower), np.abs(self.upper))))

    def axis_bounds(self) -> list[tuple[float, float]]:
        return [(float(lo), float(hi)) for lo, hi in zip(self.lower, self.upper)]

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.uniform(self.lower, self.upper, size=(n, self.dimension))


@dataclass(frozen=True)
class Simplex:
    """Probability simplex with an interior floor keeping entropy gradients bounded.

    The floor is part of the feasible set: every coordinate stays >= floor.
    Note the simplex does not contain the origin; episodes started here use
    the uniform point as the initial decision.
    """

    dimension: int
    floor: float = 1e-6

    def __post_init__(self):
        if self.dimension < 2:
            raise ValueError("simplex needs dimension >= 2")
        if not 0 < self.floor < 1.0 / self.dimension:
            raise ValueError("floor must lie in (0, 1/d)")

    def contains(self, x, tol: float = _MEMBERSHIP_TOL) -> bool:
        v = np.asarray(x, dtype=np.float64)
        return v.shape == (self.dimension,) and bool(
            np.all(np.isfinite(v))
            and np.all(v >= self.floor - tol)
            and abs(float(v.sum()) - 1.0) <= tol
        )

    def project(self, x) -> np.ndarray:
        """Euclidean projection onto {x : sum x = 1, x >= floor}.

        Substituting z = x - floor reduces to the standard sort-based
        projection onto the simplex of mass 1 - d*floor.
        """
        v = _as_vector(x)
        mass = 1.0 - self.dimension * self.floor
        z = v - self.floor
        u = np.sort(z)[::-1]
        css = np.cumsum(u) - mass
        k = np.arange(1, self.dimension + 1)
        cond = u - css / k > 0
        rho = int(np.nonzero(cond)[0][-1])
        theta = css[rho] / (rho + 1)
        return np.maximum(z - theta, 0.0) + self.floor

    def center(self) -> np.ndarray:
        return np.full(self.dimension, 1.0 / self.dimension)

    def diameter(self) -> float:
        return float(np.sqrt(2.0))

    def max_norm(self) -> float:
        return 1.0

    def axis_bounds(self) -> list[tuple[float, float]]:
        raise ValueError("simplex domain has no axis-aligned grid bounds")

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        raw = rng.dirichlet(np.ones(self.dimension), size=n)
        return raw * (1.0 - self.dimension * self.floor) + self.floor


# ---------------------------------------------------------------------------
# Mirror maps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SquaredEuclideanMap:
    """Phi(x) = 0.5 ||x||^2; gradient is the identity, modulus mu = 1."""

    mu: float = field(default=1.0, init=False)

    def value(self, x) -> float:
        v = np.asarray(x, dtype=np.float64)
        return 0.5 * float(v @ v)

    def grad(self, x) -> np.ndarray:
        return np.asarray(x, dtype=np.float64).copy()

    def gradient_bound(self, domain) -> float:
        return domain.max_norm()

    def supports(self, domain) -> bool:
        return True


@dataclass(frozen=True)
class NegativeEntropyMap:
    """Phi(x) = sum x_i log x_i on the floored simplex; modulus mu = 1.

    The Bregman divergence is the KL divergence when both arguments carry
    unit mass. Coordinates at or below zero are rejected (log singularity).
    """

    mu: float = field(default=1.0, init=False)

    def value(self, x) -> float:
        v = np.asarray(x, dtype=np.float64)
        if np.any(v <= 0):
            raise NumericalError("entropy map needs strictly positive coordinates")
        return float(np.sum(v * np.log(v)))

    def grad(self, x) -> np.ndarray:
        v = np.asarray(x, dtype=np.float64)
        if np.any(v <= 0):
            raise NumericalError("entropy map needs strictly positive coordinates")
        return 1.0 + np.log(v)

    def gradient_bound(self, domain) -> float:
        if not isinstance(domain, Simplex):
            raise ValueError("entropy map is only paired with the simplex domain")
        per_coord = max(1.0, abs(1.0 + np.log(domain.floor)))
        return float(np.sqrt(domain.dimension) * per_coord)

    def supports(self, domain) -> bool:
        return isinstance(domain, Simplex)


def bregman_divergence(mirror_map, x, y, domain=None) -> float:
    """B(x, y) = Phi(x) - Phi(y) - <grad Phi(y), x - y>; nonnegative, 0 iff x == y.

    When a domain is supplied both points are checked for membership first.
    """
    xv = _as_vector(x, "x")
    yv = _as_vector(y, "y")
    if xv.shape != yv.shape:
        raise ValueError("x and y must have equal dimension")
    if domain is not None:
        if not domain.contains(xv):
            raise ValueError("x lies outside the domain")
        if not domain.contains(yv):
            raise ValueError("y lies outside the domain")
    val = mirror_map.value(xv) - mirror_map.value(yv) - float(
        mirror_map.grad(yv) @ (xv - yv)
    )
    # tiny negatives are float noise on the diagonal
    return max(val, 0.0) if val > -1e-12 else val


# ---------------------------------------------------------------------------
# Mirror step
# ---------------------------------------------------------------------------


def _entropy_argmin(g: np.ndarray, x_ref: np.ndarray, lam: float, domain: Simplex) -> np.ndarray:
    """Exact exponentiated-gradient update on the floored simplex.

    Without the floor the minimizer is x_i ~ x_ref_i * exp(-lam * g_i).
    Floor-violating coordinates are pinned at the floor and the remaining
    mass is re-split proportionally; at most d passes are needed.
    """
    logw = np.log(x_ref) - lam * g
    logw -= logw.max()  # scale-invariant; guards exp overflow
    w = np.exp(logw)
    d = domain.dimension
    pinned = np.zeros(d, dtype=bool)
    x = np.empty(d)
    for _ in range(d):
        free_mass = 1.0 - domain.floor * pinned.sum()
        wsum = w[~pinned].sum()
        x[~pinned] = w[~pinned] * (free_mass / wsum)
        x[pinned] = domain.floor
        viol = (~pinned) & (x < domain.floor)
        if not viol.any():
            break
        pinned |= viol
    return x


def mirror_argmin(g, x_ref, lam, mirror_map, domain, method: str = "auto") -> np.ndarray:
    """Minimize <g, x - x_ref> + (1/lam) B(x, x_ref) over the domain.

    ``method`` is one of ``auto`` (closed form where exact, otherwise the
    generic solver), ``closed-form``, or ``pgd``. For the squared-Euclidean
    map the closed form is the projection of ``x_ref - lam * g``; for the
    entropy map it is the floor-aware exponentiated-gradient update.
    """
    gv = _as_vector(g, "g")
    xr = _as_vector(x_ref, "x_ref")
    if gv.shape != xr.shape:
        raise ValueError("g and x_ref must have equal dimension")
    if not lam > 0:
        raise ValueError("lam must be positive")
    if not domain.contains(xr):
        raise ValueError("x_ref lies outside the domain")
    if not mirror_map.supports(domain):
        raise ValueError("mirror map does not support this domain")

    if method == "pgd":
        return mirror_argmin_pgd(gv, xr, lam, mirror_map, domain)
    if method not in ("auto", "closed-form"):
        raise ValueError(f"unknown method {method!r}")

    if isinstance(mirror_map, SquaredEuclideanMap):
        return domain.project(xr - lam * gv)
    if isinstance(mirror_map, NegativeEntropyMap):
        return _entropy_argmin(gv, xr, lam, domain)
    if method == "closed-form":
        raise ValueError("no closed form for this mirror map")
    return mirror_argmin_pgd(gv, xr, lam, mirror_map, domain)


def mirror_argmin_pgd(
    g,
    x_ref,
    lam,
    mirror_map,
    domain,
    max_iters: int = 10_000,
    step_tol: float = 1e-12,
) -> np.ndarray:
    """Generic projected-gradient solver for the mirror step.

    Runs projected descent on h(x) = <g, x - x_ref> + (1/lam) B(x, x_ref)
    with Armijo backtracking from an initial step of ``lam`` (for the
    squared-Euclidean map that first trial step is exact, so the solver
    terminates after one iteration). Stops when successive iterates move
    less than ``step_tol``; raises if the iteration budget is exhausted.
    """
    gv = _as_vector(g, "g")
    xr = _as_vector(x_ref, "x_ref")

    def h(x):
        return float(gv @ (x - xr)) + bregman_divergence(mirror_map, x, xr) / lam

    x = xr.copy()
    hx = h(x)
    step = lam
    shift = np.inf
    for _ in range(max_iters):
        grad_h = gv + (mirror_map.grad(x) - mirror_map.grad(xr)) / lam
        trial = min(lam, 4.0 * step)  # warm-start from the last accepted step
        moved = None
        for _ in range(80):
            cand = domain.project(x - trial * grad_h)
            gap = float(np.linalg.norm(cand - x))
            # sufficient decrease for the gradient mapping; rules out cycles
            if h(cand) <= hx - 0.25 * gap * gap / trial:
                moved = cand
                step = trial
                break
            trial *= 0.5
        fixed_point_gap = float(np.linalg.norm(x - domain.project(x - lam * grad_h)))
        if moved is None:
            # objective differences are below float resolution; accept if the
            # projected-gradient fixed point has essentially been reached
            if fixed_point_gap <= max(1e-8, 100.0 * step_tol):
                return x
            raise NumericalError("mirror step line search failed", residual=fixed_point_gap)
        shift = float(np.linalg.norm(moved - x))
        x, hx = moved, h(moved)
        if shift < step_tol:
            return x
    raise NumericalError("mirror step did not converge", residual=shift)
