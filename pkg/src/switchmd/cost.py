"""Cost accounting: operating cost, switching cost, and dynamic regret.

A ledger charges round t with the loss of the decision in force at t and
with the movement *into* that decision: ``switching[t] = ||p_t - p_{t-1}||^sigma``
over played decisions, so rounds 2..T carry the T-1 between-round
transitions and round 1 optionally carries the transition from the initial
point (off by default, matching the definition that sums between played
decisions only).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np


def switching_cost(x_a, x_b, sigma: float) -> float:
    """||x_b - x_a||_2 ** sigma with sigma in [1, 2]."""
    if not 1.0 <= sigma <= 2.0:
        raise ValueError("sigma must lie in [1, 2]")
    a = np.asarray(x_a, dtype=np.float64)
    b = np.asarray(x_b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError("points must have equal dimension")
    return float(np.linalg.norm(b - a) ** sigma)


@dataclass(frozen=True)
class CostLedger:
    """Per-round operating and switching costs for one episode."""

    operating: np.ndarray  # (T,)
    switching: np.ndarray  # (T,), entry t-1 is the cost of moving into round t
    sigma: float
    include_x0_transition: bool

    def __post_init__(self):
        if self.operating.shape != self.switching.shape:
            raise ValueError("operating and switching must have equal length")
        if np.any(self.switching < 0):
            raise ValueError("switching entries must be nonnegative")

    @property
    def horizon(self) -> int:
        return self.operating.shape[0]

    @property
    def operating_total(self) -> float:
        return float(self.operating.sum())

    @property
    def switching_total(self) -> float:
        return float(self.switching.sum())

    @property
    def total(self) -> float:
        return self.operating_total + self.switching_total


def ledger_from_transcript(transcript, stream, sigma, include_x0_transition: bool = False) -> CostLedger:
    """Build the ledger for a transcript against the stream that produced it."""
    T = transcript.horizon
    if len(stream) != T:
        raise ValueError(f"stream has {len(stream)} rounds but transcript has {T}")
    played = transcript.played()
    operating = np.array([stream.loss(t).value(played[t - 1]) for t in range(1, T + 1)])
    switching = np.zeros(T)
    deltas = np.linalg.norm(np.diff(played, axis=0), axis=1)
    if not 1.0 <= sigma <= 2.0:
        raise ValueError("sigma must lie in [1, 2]")
    switching[1:] = deltas**sigma
    if include_x0_transition:
        switching[0] = float(np.linalg.norm(played[0] - transcript.initial) ** sigma)
    return CostLedger(
        operating=operating,
        switching=switching,
        sigma=float(sigma),
        include_x0_transition=include_x0_transition,
    )


def average_loss(ledger: CostLedger, t: int) -> tuple[float, float, float]:
    """(avg operating, avg switching, avg total) over rounds 1..t."""
    if not 1 <= t <= ledger.horizon:
        raise ValueError(f"round {t} outside 1..{ledger.horizon}")
    avg_op = float(ledger.operating[:t].sum()) / t
    avg_sw = float(ledger.switching[:t].sum()) / t
    return avg_op, avg_sw, avg_op + avg_sw


def dynamic_regret(ledger: CostLedger, comparator) -> float:
    """Total cost of the player minus total cost of the comparator path.

    May be negative: the comparator is budget-constrained while the player
    is free to move. Both sides must use the same sigma and the
    between-played-decisions transition convention.
    """
    if ledger.sigma != comparator.sigma:
        raise ValueError(
            f"sigma mismatch: ledger {ledger.sigma} vs comparator {comparator.sigma}"
        )
    if ledger.include_x0_transition:
        raise ValueError(
            "comparator paths carry no pre-path transition; build the ledger "
            "without the x0 transition"
        )
    if ledger.horizon != comparator.horizon:
        raise ValueError("ledger and comparator cover different horizons")
    return ledger.total - comparator.total_cost


LEDGER_CSV_HEADER = [
    "round",
    "operating",
    "switching",
    "cum_operating",
    "cum_switching",
    "avg_operating",
    "avg_switching",
    "avg_total",
]


def write_ledger_csv(ledger: CostLedger, path) -> None:
    cum_op = np.cumsum(ledger.operating)
    cum_sw = np.cumsum(ledger.switching)
    rounds = np.arange(1, ledger.horizon + 1)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(LEDGER_CSV_HEADER)
        for t in rounds:
            i = t - 1
            avg_op = cum_op[i] / t
            avg_sw = cum_sw[i] / t
            writer.writerow(
                [
                    t,
                    repr(float(ledger.operating[i])),
                    repr(float(ledger.switching[i])),
                    repr(float(cum_op[i])),
                    repr(float(cum_sw[i])),
                    repr(float(avg_op)),
                    repr(float(avg_sw)),
                    repr(float(avg_op + avg_sw)),
                ]
            )
