"""The two online protocols and their mirror-descent players.

Both protocols run the same state recursion

    x_t = argmin_{x in X} <grad f_t(x_{t-1}), x - x_{t-1}> + (1/rate_t) B(x, x_{t-1})

and differ only in when the round-t cost is incurred: an OA player sees
f_t first and plays x_t, an OCO player has already played x_{t-1} when f_t
arrives. The transcript stores the full state sequence x_0..x_T plus the
protocol tag; cost accounting picks the played decision per round from it.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .cost import ledger_from_transcript
from .errors import ProtocolError, TuningFailureError
from .geometry import mirror_argmin
from .losses import ProblemConstants

PROTOCOLS = ("OA", "OCO")


# ---------------------------------------------------------------------------
# Learning-rate schedules
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConstantRate:
    """A single positive rate used for every round (the theory schedules)."""

    value: float

    def __post_init__(self):
        if not self.value > 0:
            raise ValueError("rate must be positive")

    def at(self, t: int) -> float:
        return self.value


@dataclass(frozen=True)
class SqrtDecayRate:
    """delta / sqrt(t) at round t >= 1 (the practical schedule)."""

    delta: float

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("delta must be positive")

    def at(self, t: int) -> float:
        if t < 1:
            raise ValueError("rounds are 1-based")
        return self.delta / math.sqrt(t)


class DegenerateBudgetWarning(UserWarning):
    """Raised when a zero budget collapses the OA rate formula."""


def oa_theory_rate(c: ProblemConstants) -> float:
    """Constant OA rate min(mu/L, T^{-1/(1+sigma)} * D^{1/(1+sigma)}).

    With D = 0 the second term degenerates to 0 and would freeze the
    player, so mu/L is returned with a warning instead.
    """
    curvature_branch = c.mu / c.L if c.L > 0 else math.inf
    if c.budget_D == 0:
        if not math.isfinite(curvature_branch):
            raise ValueError("rate undefined: D = 0 and L = 0")
        warnings.warn(
            "budget D = 0 degenerates the OA rate; using mu/L",
            DegenerateBudgetWarning,
        )
        return curvature_branch
    p = 1.0 / (1.0 + c.sigma)
    return min(curvature_branch, c.horizon_T ** (-p) * c.budget_D**p)


def oco_theory_rate(c: ProblemConstants) -> float:
    """Constant OCO rate min(mu/4, sqrt((D + G) / T))."""
    return min(c.mu / 4.0, math.sqrt((c.budget_D + c.G) / c.horizon_T))


# ---------------------------------------------------------------------------
# Steps and episodes
# ---------------------------------------------------------------------------


def md_oa_step(loss_t, x_prev, gamma, mirror_map, domain) -> np.ndarray:
    """One OA round: observe the loss, then step from x_prev using its gradient."""
    return mirror_argmin(loss_t.grad(x_prev), x_prev, gamma, mirror_map, domain)


def md_oco_step(grad_t, x_t, eta, mirror_map, domain) -> np.ndarray:
    """One OCO update: the gradient was taken at the already-played x_t."""
    return mirror_argmin(grad_t, x_t, eta, mirror_map, domain)


@dataclass(frozen=True)
class EpisodeTranscript:
    """Full record of one episode: states x_0..x_T, gradients, rates, protocol."""

    protocol: str
    decisions: np.ndarray  # (T+1, d)
    gradients: np.ndarray  # (T, d)
    rates: np.ndarray  # (T,)

    def __post_init__(self):
        if self.protocol not in PROTOCOLS:
            raise ValueError(f"protocol must be one of {PROTOCOLS}")
        if self.decisions.shape[0] != self.gradients.shape[0] + 1:
            raise ValueError("need exactly T decisions after x_0")
        if self.rates.shape[0] != self.gradients.shape[0]:
            raise ValueError("need one rate per round")

    @property
    def horizon(self) -> int:
        return self.gradients.shape[0]

    @property
    def initial(self) -> np.ndarray:
        return self.decisions[0]

    def played(self) -> np.ndarray:
        """Decision in force at each round: post-update for OA, pre-update for OCO."""
        if self.protocol == "OA":
            return self.decisions[1:]
        return self.decisions[:-1]


def run_episode(protocol, stream, schedule, mirror_map, domain, x0=None) -> EpisodeTranscript:
    """Run one full episode of either protocol over the stream.

    OA ordering: reveal f_t, then decide x_t from x_{t-1}. OCO ordering:
    play x_t, then reveal f_t and compute x_{t+1}. The state recursion is
    shared; the protocol tag controls which decision each round's cost is
    charged to.
    """
    if protocol not in PROTOCOLS:
        raise ValueError(f"protocol must be one of {PROTOCOLS}")
    T = len(stream)
    if T < 1:
        raise ProtocolError("stream must contain at least one round")
    x = np.asarray(x0, dtype=np.float64) if x0 is not None else domain.center()
    if not domain.contains(x):
        raise ValueError("x0 lies outside the domain")

    d = x.shape[0]
    decisions = np.empty((T + 1, d))
    gradients = np.empty((T, d))
    rates = np.empty(T)
    decisions[0] = x
    for t in range(1, T + 1):
        try:
            loss = stream.loss(t)
        except IndexError as exc:
            raise ProtocolError(f"stream exhausted at round {t}") from exc
        rate = schedule.at(t)
        if protocol == "OA":
            x = md_oa_step(loss, x, rate, mirror_map, domain)
            g = loss.grad(decisions[t - 1])
        else:
            g = loss.grad(x)
            x = md_oco_step(g, x, rate, mirror_map, domain)
        decisions[t] = x
        gradients[t - 1] = g
        rates[t - 1] = rate
    return EpisodeTranscript(
        protocol=protocol, decisions=decisions, gradients=gradients, rates=rates
    )


# ---------------------------------------------------------------------------
# Step-size halving
# ---------------------------------------------------------------------------


def average_loss_converged(ledger) -> bool:
    """Converged iff the final average total loss did not rise past the
    midpoint average (tolerance 1e-9) and every entry is finite."""
    from .cost import average_loss

    T = ledger.horizon
    if not np.all(np.isfinite(ledger.operating)) or not np.all(np.isfinite(ledger.switching)):
        return False
    final = average_loss(ledger, T)[2]
    mid = average_loss(ledger, math.ceil(T / 2))[2]
    return final <= mid + 1e-9


def heuristic_tune(
    protocol,
    stream,
    domain,
    mirror_map,
    delta0: float = 10.0,
    *,
    sigma: float = 1.0,
    min_delta: float = 1e-6,
    x0=None,
) -> float:
    """Halve delta from delta0 until the delta/sqrt(t) schedule converges.

    Convergence is judged on the episode's average total loss (operating
    plus switching at the given sigma). Returns the first passing delta;
    raises if delta underflows ``min_delta`` without converging.
    """
    if not delta0 > 0:
        raise ValueError("delta0 must be positive")
    delta = float(delta0)
    while delta >= min_delta:
        tr = run_episode(protocol, stream, SqrtDecayRate(delta), mirror_map, domain, x0=x0)
        ledger = ledger_from_transcript(tr, stream, sigma)
        if average_loss_converged(ledger):
            return delta
        delta /= 2.0
    raise TuningFailureError(f"no delta above {min_delta:g} converged")
