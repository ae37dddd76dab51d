"""Loss-stream generators and CSV ingestion.

Streams are immutable after construction and deterministic under a fixed
seed. Rounds are 1-based: ``stream.loss(t)`` returns the round-t loss.
"""

from __future__ import annotations

import csv
from bisect import bisect_left
from dataclasses import dataclass

import numpy as np

from .losses import LinearLoss, LogisticLoss


class ListStream:
    """A fixed sequence of round losses (mostly for tests and adapters)."""

    kind = "list"

    def __init__(self, losses):
        self._losses = list(losses)
        if not self._losses:
            raise ValueError("stream must contain at least one round")
        dims = {loss.dimension for loss in self._losses}
        if len(dims) != 1:
            raise ValueError("all rounds must share one dimension")
        self.dimension = dims.pop()

    def __len__(self) -> int:
        return len(self._losses)

    def loss(self, t: int):
        if not 1 <= t <= len(self._losses):
            raise IndexError(f"round {t} outside 1..{len(self._losses)}")
        return self._losses[t - 1]

    def losses(self) -> list:
        return list(self._losses)


class RademacherStream:
    """Linear losses <v_t, x> with i.i.d. uniform +-1 coefficients."""

    kind = "rademacher"

    def __init__(self, d: int, T: int, seed: int):
        if d < 1 or T < 1:
            raise ValueError("need d >= 1 and T >= 1")
        rng = np.random.default_rng(seed)
        self.coefficients = rng.integers(0, 2, size=(T, d)).astype(np.float64) * 2.0 - 1.0
        self.dimension = d
        self.seed = int(seed)

    def __len__(self) -> int:
        return self.coefficients.shape[0]

    def loss(self, t: int) -> LinearLoss:
        if not 1 <= t <= len(self):
            raise IndexError(f"round {t} outside 1..{len(self)}")
        return LinearLoss(self.coefficients[t - 1])

    def losses(self) -> list[LinearLoss]:
        return [LinearLoss(v) for v in self.coefficients]


@dataclass(frozen=True)
class DriftSchedule:
    """Segment end-rounds (strictly increasing, covering 1..T) and the
    ground-truth vector active in each segment."""

    segment_ends: tuple[int, ...]
    vectors: tuple

    def __post_init__(self):
        ends = self.segment_ends
        if len(ends) != len(self.vectors) or not ends:
            raise ValueError("need one vector per segment")
        if any(b <= a for a, b in zip(ends, ends[1:])) or ends[0] < 1:
            raise ValueError("segment ends must be strictly increasing and >= 1")

    @property
    def horizon(self) -> int:
        return self.segment_ends[-1]

    def vector_at(self, t: int) -> np.ndarray:
        if not 1 <= t <= self.horizon:
            raise ValueError(f"round {t} outside 1..{self.horizon}")
        return np.asarray(self.vectors[bisect_left(self.segment_ends, t)])


def alternating_flip_schedule(d: int, T: int, n_segments: int, seed: int) -> DriftSchedule:
    """Equal-length segments alternating between a random unit direction
    and its negation; one segment means a stationary stream."""
    if not 1 <= n_segments <= T:
        raise ValueError("need 1 <= n_segments <= T")
    rng = np.random.default_rng(seed)
    w = rng.standard_normal(d)
    w /= np.linalg.norm(w)
    ends = tuple(int(e) for e in np.linspace(0, T, n_segments + 1).round()[1:])
    vectors = tuple(w if k % 2 == 0 else -w for k in range(n_segments))
    return DriftSchedule(segment_ends=ends, vectors=vectors)


def two_segment_flip_schedule(d: int, T: int, seed: int) -> DriftSchedule:
    """A random unit direction for the first half, its negation after."""
    return alternating_flip_schedule(d, T, 2, seed)


class DriftingLogisticStream:
    """Logistic rounds whose labelling direction changes by segment.

    Instances are uniform on [-1, 1]^d; the round-t label is the sign of
    <w_seg(t), a_t>, flipped with the given probability.
    """

    kind = "drifting-logistic"

    def __init__(self, d: int, T: int, schedule: DriftSchedule, label_noise: float, seed: int):
        if schedule.horizon != T:
            raise ValueError("schedule must cover exactly 1..T")
        if not 0.0 <= label_noise < 0.5:
            raise ValueError("label noise must lie in [0, 0.5)")
        rng = np.random.default_rng(seed)
        self.instances = rng.uniform(-1.0, 1.0, size=(T, d))
        truth = np.array(
            [np.sign(schedule.vector_at(t) @ self.instances[t - 1]) for t in range(1, T + 1)]
        )
        truth[truth == 0] = 1.0
        flips = rng.random(T) < label_noise
        self.labels = np.where(flips, -truth, truth).astype(np.int64)
        self.dimension = d
        self.seed = int(seed)
        self.schedule = schedule
        self.label_noise = float(label_noise)

    def __len__(self) -> int:
        return self.instances.shape[0]

    def loss(self, t: int) -> LogisticLoss:
        if not 1 <= t <= len(self):
            raise IndexError(f"round {t} outside 1..{len(self)}")
        return LogisticLoss(self.instances[t - 1], int(self.labels[t - 1]))

    def losses(self) -> list[LogisticLoss]:
        return [LogisticLoss(a, int(y)) for a, y in zip(self.instances, self.labels)]


class CsvStream:
    """Logistic rounds read from a label,feature,... file in row order."""

    kind = "csv-dataset"

    def __init__(self, instances: np.ndarray, labels: np.ndarray, path: str = ""):
        self.instances = instances
        self.labels = labels
        self.dimension = instances.shape[1]
        self.path = path

    def __len__(self) -> int:
        return self.instances.shape[0]

    def loss(self, t: int) -> LogisticLoss:
        if not 1 <= t <= len(self):
            raise IndexError(f"round {t} outside 1..{len(self)}")
        return LogisticLoss(self.instances[t - 1], int(self.labels[t - 1]))

    def losses(self) -> list[LogisticLoss]:
        return [LogisticLoss(a, int(y)) for a, y in zip(self.instances, self.labels)]


def load_csv_stream(path, normalize: bool = True) -> CsvStream:
    """Load rows of ``label,feature_1,...,feature_d``.

    Labels may be {-1, +1} or {0, 1}; 0 maps to -1. Row order is the drift
    signal and is preserved. With ``normalize`` each feature column is
    divided by its max absolute value (columns of zeros pass through).
    """
    rows: list[list[float]] = []
    labels: list[int] = []
    width = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",")
            if width is None:
                width = len(parts)
                if width < 2:
                    raise ValueError(f"{path}:{lineno}: need a label and at least one feature")
            elif len(parts) != width:
                raise ValueError(f"{path}:{lineno}: expected {width} fields, got {len(parts)}")
            try:
                label = float(parts[0])
                feats = [float(p) for p in parts[1:]]
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: malformed number: {exc}") from exc
            if label not in (-1.0, 0.0, 1.0):
                raise ValueError(f"{path}:{lineno}: label must be in {{-1, 0, +1}}")
            labels.append(-1 if label <= 0.0 else 1)
            rows.append(feats)
    if not rows:
        raise ValueError(f"{path}: empty dataset")
    X = np.asarray(rows, dtype=np.float64)
    if normalize:
        scale = np.abs(X).max(axis=0)
        scale[scale == 0] = 1.0
        X = X / scale
    return CsvStream(X, np.asarray(labels, dtype=np.int64), path=str(path))


def save_stream_csv(stream, path) -> None:
    """Write a logistic stream as label,feature rows with a metadata comment."""
    seed = getattr(stream, "seed", "none")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# seed={seed},kind={stream.kind}\n")
        writer = csv.writer(fh, lineterminator="\n")
        for t in range(1, len(stream) + 1):
            loss = stream.loss(t)
            if not isinstance(loss, LogisticLoss):
                raise ValueError("only logistic streams have a dataset representation")
            writer.writerow([loss.label, *[repr(float(v)) for v in loss.a]])
