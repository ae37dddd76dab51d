"""Per-round loss functions and problem-constant bookkeeping.

Two convex loss families are supported: linear losses <v, x> (the
adversarial lower-bound construction) and logistic losses
log(1 + exp(-y * <a, x>)) for binary classification. Each loss exposes its
value, gradient, a Lipschitz constant for the gradient, and a bound on the
gradient norm over a domain.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit


@dataclass(frozen=True)
class LinearLoss:
    """f(x) = <v, x>."""

    v: np.ndarray

    def __init__(self, v):
        vec = np.asarray(v, dtype=np.float64)
        if vec.ndim != 1 or not np.all(np.isfinite(vec)):
            raise ValueError("v must be a finite 1-D vector")
        object.__setattr__(self, "v", vec)

    @property
    def dimension(self) -> int:
        return self.v.shape[0]

    def value(self, x) -> float:
        return float(self.v @ np.asarray(x, dtype=np.float64))

    def values(self, points: np.ndarray) -> np.ndarray:
        return np.asarray(points, dtype=np.float64) @ self.v

    def grad(self, x) -> np.ndarray:
        return self.v.copy()

    def lipschitz_gradient(self) -> float:
        return 0.0

    def gradient_bound(self, domain) -> float:
        return float(np.linalg.norm(self.v))


@dataclass(frozen=True)
class LogisticLoss:
    """f(x) = log(1 + exp(-label * <a, x>)) with label in {-1, +1}."""

    a: np.ndarray
    label: int

    def __init__(self, a, label):
        vec = np.asarray(a, dtype=np.float64)
        if vec.ndim != 1 or not np.all(np.isfinite(vec)):
            raise ValueError("a must be a finite 1-D vector")
        if label not in (-1, 1):
            raise ValueError("label must be -1 or +1")
        object.__setattr__(self, "a", vec)
        object.__setattr__(self, "label", int(label))

    @property
    def dimension(self) -> int:
        return self.a.shape[0]

    def value(self, x) -> float:
        z = self.label * float(self.a @ np.asarray(x, dtype=np.float64))
        return float(np.logaddexp(0.0, -z))

    def values(self, points: np.ndarray) -> np.ndarray:
        z = self.label * (np.asarray(points, dtype=np.float64) @ self.a)
        return np.logaddexp(0.0, -z)

    def grad(self, x) -> np.ndarray:
        z = self.label * float(self.a @ np.asarray(x, dtype=np.float64))
        return (-self.label * float(expit(-z))) * self.a

    def lipschitz_gradient(self) -> float:
        # hessian = a a^T s(1-s) with s(1-s) <= 1/4
        return 0.25 * float(self.a @ self.a)

    def gradient_bound(self, domain) -> float:
        return float(np.linalg.norm(self.a))


@dataclass(frozen=True)
class ProblemConstants:
    """Constants (mu, L, G, R) plus the cost exponent, budget, and horizon."""

    mu: float
    L: float
    G: float
    R: float
    sigma: float = 1.0
    budget_D: float = 0.0
    horizon_T: int = 1

    def __post_init__(self):
        if not (self.mu > 0 and self.G > 0 and self.R > 0):
            raise ValueError("mu, G, R must be positive")
        if self.L < 0:
            raise ValueError("L must be nonnegative")
        if not 1.0 <= self.sigma <= 2.0:
            raise ValueError("sigma must lie in [1, 2]")
        if self.budget_D < 0:
            raise ValueError("budget_D must be nonnegative")
        if self.horizon_T < 1:
            raise ValueError("horizon_T must be >= 1")


def estimate_constants(
    stream_sample,
    domain,
    mirror_map,
    *,
    sigma: float = 1.0,
    budget_D: float = 0.0,
    horizon_T: int | None = None,
) -> ProblemConstants:
    """Derive (mu, L, G, R) from a sample of round losses.

    mu comes from the mirror map; L is the largest Lipschitz-gradient
    constant in the sample; G bounds both the loss gradients and the mirror
    map gradient over the domain; R covers both the Euclidean diameter and
    the Bregman diameter. The exponent, budget, and horizon are not
    derivable from a sample and are passed through (horizon defaults to the
    sample length).
    """
    losses = list(stream_sample)
    if not losses:
        raise ValueError("stream sample must be nonempty")
    L = max(loss.lipschitz_gradient() for loss in losses)
    G_losses = max(loss.gradient_bound(domain) for loss in losses)
    G = max(G_losses, mirror_map.gradient_bound(domain))
    R = max(domain.diameter(), np.sqrt(_bregman_diameter(mirror_map, domain)))
    return ProblemConstants(
        mu=mirror_map.mu,
        L=L,
        G=G,
        R=float(R),
        sigma=sigma,
        budget_D=budget_D,
        horizon_T=horizon_T if horizon_T is not None else len(losses),
    )


def _bregman_diameter(mirror_map, domain) -> float:
    from .geometry import NegativeEntropyMap, Simplex, SquaredEuclideanMap

    if isinstance(mirror_map, SquaredEuclideanMap):
        return 0.5 * domain.diameter() ** 2
    if isinstance(mirror_map, NegativeEntropyMap) and isinstance(domain, Simplex):
        # KL on the floored simplex is at most log of the mass ratio
        top = 1.0 - (domain.dimension - 1) * domain.floor
        return float(np.log(top / domain.floor))
    raise ValueError("unsupported mirror map / domain pairing")
