"""Experiment runner: configs, seeded runs, sweeps, and rate fitting.

Configuration lives in a flat ``key = value`` text file (see
:data:`CONFIG_KEYS`). A master seed expands into per-run seeds through a
splitmix64 derivation keyed on the run label, so adding runs to a sweep
never perturbs existing ones. Every run writes a manifest recording the
config, derived seeds, and the constants actually used; outputs are
written atomically (temp file + rename).
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .algorithms import (
    ConstantRate,
    SqrtDecayRate,
    heuristic_tune,
    oa_theory_rate,
    oco_theory_rate,
    run_episode,
)
from .cost import average_loss, dynamic_regret, ledger_from_transcript, write_ledger_csv
from .errors import ConfigError, FitInvalidError
from .geometry import Ball, SquaredEuclideanMap
from .losses import estimate_constants
from .oracle import GridSpec, offline_optimum_dp, write_comparator_csv
from .streams import (
    DriftingLogisticStream,
    RademacherStream,
    alternating_flip_schedule,
    load_csv_stream,
)

RATE_FIT_RESIDUAL_THRESHOLD = 0.05  # log2 units^2 per point before the smallest T is dropped

SIGMA_SUMMARY_HEADER = ["sigma", "oa_sl", "oco_sl", "diff"]
RATE_SWEEP_HEADER = ["T", "mean_regret", "std_regret", "n_seeds"]
REGRET_SUMMARY_HEADER = ["protocol", "sigma", "player_total", "comparator_total", "regret"]


# ---------------------------------------------------------------------------
# Seed derivation
# ---------------------------------------------------------------------------

_MASK64 = (1 << 64) - 1


def _splitmix64(state: int) -> int:
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def _fnv1a64(text: str) -> int:
    h = 0xCBF29CE484222325
    for byte in text.encode("utf-8"):
        h = ((h ^ byte) * 0x100000001B3) & _MASK64
    return h


def derive_seed(master_seed: int, label: str) -> int:
    """Stable per-run seed: splitmix64 of the master xor the label hash."""
    return _splitmix64((master_seed & _MASK64) ^ _fnv1a64(label))


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

CONFIG_KEYS = {
    "protocols": "comma list drawn from {oa, oco}",
    "stream": "rademacher | drifting-logistic | csv",
    "csv_path": "dataset path when stream = csv",
    "dimension": "stream dimension d",
    "horizon": "rounds T for single runs",
    "horizons": "comma list of T values for rate sweeps",
    "sigmas": "comma list of switching exponents in [1, 2]",
    "budget": "comparator path-length budget D",
    "rate": "theory | heuristic",
    "delta0": "starting delta for heuristic halving",
    "master_seed": "integer master seed",
    "num_seeds": "replicates per sweep point",
    "radius": "ball-domain radius",
    "oracle": "on | off",
    "grid_points": "oracle grid points per axis (m)",
    "budget_buckets": "oracle budget buckets (K)",
    "include_x0_transition": "true | false",
    "label_noise": "label flip probability for drifting streams",
    "drift_segments": "number of alternating drift segments (1 = stationary)",
    "out_dir": "output directory",
}

_DEFAULTS = {
    "protocols": ("oa", "oco"),
    "stream": "drifting-logistic",
    "csv_path": "",
    "dimension": 50,
    "horizon": 1500,
    "horizons": (),
    "sigmas": (1.0, 1.5, 2.0),
    "budget": 10.0,
    "rate": "heuristic",
    "delta0": 10.0,
    "master_seed": 1,
    "num_seeds": 10,
    "radius": 2.0,
    "oracle": False,
    "grid_points": 41,
    "budget_buckets": 64,
    "include_x0_transition": False,
    "label_noise": 0.05,
    "drift_segments": 2,
    "out_dir": "results",
}


@dataclass(frozen=True)
class ExperimentConfig:
    protocols: tuple[str, ...] = _DEFAULTS["protocols"]
    stream: str = _DEFAULTS["stream"]
    csv_path: str = _DEFAULTS["csv_path"]
    dimension: int = _DEFAULTS["dimension"]
    horizon: int = _DEFAULTS["horizon"]
    horizons: tuple[int, ...] = _DEFAULTS["horizons"]
    sigmas: tuple[float, ...] = _DEFAULTS["sigmas"]
    budget: float = _DEFAULTS["budget"]
    rate: str = _DEFAULTS["rate"]
    delta0: float = _DEFAULTS["delta0"]
    master_seed: int = _DEFAULTS["master_seed"]
    num_seeds: int = _DEFAULTS["num_seeds"]
    radius: float = _DEFAULTS["radius"]
    oracle: bool = _DEFAULTS["oracle"]
    grid_points: int = _DEFAULTS["grid_points"]
    budget_buckets: int = _DEFAULTS["budget_buckets"]
    include_x0_transition: bool = _DEFAULTS["include_x0_transition"]
    label_noise: float = _DEFAULTS["label_noise"]
    drift_segments: int = _DEFAULTS["drift_segments"]
    out_dir: str = _DEFAULTS["out_dir"]

    def __post_init__(self):
        if not self.protocols:
            raise ConfigError("need at least one protocol")
        if any(p not in ("oa", "oco") for p in self.protocols):
            raise ConfigError("protocols must be drawn from {oa, oco}")
        if self.stream not in ("rademacher", "drifting-logistic", "csv"):
            raise ConfigError(f"unknown stream kind {self.stream!r}")
        if self.stream == "csv" and not self.csv_path:
            raise ConfigError("stream = csv requires csv_path")
        if self.dimension < 1 or self.horizon < 1:
            raise ConfigError("dimension and horizon must be positive")
        if not self.sigmas or any(not 1.0 <= s <= 2.0 for s in self.sigmas):
            raise ConfigError("every sigma must lie in [1, 2]")
        if self.budget < 0:
            raise ConfigError("budget must be nonnegative")
        if self.rate not in ("theory", "heuristic"):
            raise ConfigError("rate must be theory or heuristic")
        if self.delta0 <= 0 or self.radius <= 0:
            raise ConfigError("delta0 and radius must be positive")
        if self.num_seeds < 1:
            raise ConfigError("num_seeds must be >= 1")
        if not 0.0 <= self.label_noise < 0.5:
            raise ConfigError("label_noise must lie in [0, 0.5)")
        if not 1 <= self.drift_segments <= self.horizon:
            raise ConfigError("drift_segments must lie in [1, horizon]")

    def to_text(self) -> str:
        """Canonical flat key = value rendering; parses back to an equal config."""
        vals = {
            "protocols": ",".join(self.protocols),
            "stream": self.stream,
            "csv_path": self.csv_path,
            "dimension": str(self.dimension),
            "horizon": str(self.horizon),
            "horizons": ",".join(str(t) for t in self.horizons),
            "sigmas": ",".join(_format_float(s) for s in self.sigmas),
            "budget": _format_float(self.budget),
            "rate": self.rate,
            "delta0": _format_float(self.delta0),
            "master_seed": str(self.master_seed),
            "num_seeds": str(self.num_seeds),
            "radius": _format_float(self.radius),
            "oracle": "on" if self.oracle else "off",
            "grid_points": str(self.grid_points),
            "budget_buckets": str(self.budget_buckets),
            "include_x0_transition": "true" if self.include_x0_transition else "false",
            "label_noise": _format_float(self.label_noise),
            "drift_segments": str(self.drift_segments),
            "out_dir": self.out_dir,
        }
        return "".join(f"{k} = {vals[k]}\n" for k in CONFIG_KEYS)

    def config_hash(self) -> str:
        return hashlib.sha256(self.to_text().encode("utf-8")).hexdigest()


def _format_float(x: float) -> str:
    return repr(float(x))


def parse_config_text(text: str) -> ExperimentConfig:
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, _, value = stripped.partition("=")
        key = key.strip()
        if key not in CONFIG_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value.strip()

    kwargs = {}
    try:
        if "protocols" in raw:
            kwargs["protocols"] = tuple(
                p.strip().lower() for p in raw["protocols"].split(",") if p.strip()
            )
        for key in ("stream", "csv_path", "rate", "out_dir"):
            if key in raw:
                kwargs[key] = raw[key]
        for key in (
            "dimension",
            "horizon",
            "master_seed",
            "num_seeds",
            "grid_points",
            "budget_buckets",
            "drift_segments",
        ):
            if key in raw:
                kwargs[key] = int(raw[key])
        for key in ("budget", "delta0", "radius", "label_noise"):
            if key in raw:
                kwargs[key] = float(raw[key])
        if "horizons" in raw:
            kwargs["horizons"] = tuple(
                int(t.strip()) for t in raw["horizons"].split(",") if t.strip()
            )
        if "sigmas" in raw:
            kwargs["sigmas"] = tuple(
                float(s.strip()) for s in raw["sigmas"].split(",") if s.strip()
            )
        if "oracle" in raw:
            kwargs["oracle"] = _parse_flag(raw["oracle"], on="on", off="off")
        if "include_x0_transition" in raw:
            kwargs["include_x0_transition"] = _parse_flag(
                raw["include_x0_transition"], on="true", off="false"
            )
    except ValueError as exc:
        raise ConfigError(f"bad value: {exc}") from exc
    return ExperimentConfig(**kwargs)


def _parse_flag(value: str, on: str, off: str) -> bool:
    v = value.strip().lower()
    if v == on:
        return True
    if v == off:
        return False
    raise ConfigError(f"expected {on!r} or {off!r}, got {value!r}")


def load_config(path) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read())


# ---------------------------------------------------------------------------
# Atomic output helpers
# ---------------------------------------------------------------------------


def _atomic_write(path: str, write_fn) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    os.close(fd)
    try:
        write_fn(tmp)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


def format_sigma(sigma: float) -> str:
    return f"{sigma:g}"


# ---------------------------------------------------------------------------
# Single-run machinery
# ---------------------------------------------------------------------------


def make_stream(config: ExperimentConfig, seed: int, horizon: int | None = None):
    T = horizon if horizon is not None else config.horizon
    if config.stream == "rademacher":
        return RademacherStream(config.dimension, T, seed)
    if config.stream == "drifting-logistic":
        schedule = alternating_flip_schedule(
            config.dimension, T, config.drift_segments, derive_seed(seed, "drift")
        )
        return DriftingLogisticStream(config.dimension, T, schedule, config.label_noise, seed)
    return load_csv_stream(config.csv_path)


def make_domain(config: ExperimentConfig) -> Ball:
    return Ball(dimension=config.dimension, radius=config.radius)


def _schedule_for(config, protocol, stream, domain, mirror_map, sigma):
    """Pick the per-run schedule; returns (schedule, description, constants)."""
    constants = estimate_constants(
        stream.losses(),
        domain,
        mirror_map,
        sigma=sigma,
        budget_D=config.budget,
        horizon_T=len(stream),
    )
    if config.rate == "theory":
        value = oa_theory_rate(constants) if protocol == "OA" else oco_theory_rate(constants)
        return ConstantRate(value), {"kind": "theory", "value": value}, constants
    delta = heuristic_tune(
        protocol, stream, domain, mirror_map, delta0=config.delta0, sigma=sigma
    )
    return SqrtDecayRate(delta), {"kind": "heuristic", "delta": delta}, constants


@dataclass(frozen=True)
class SingleRunResult:
    protocol: str
    sigma: float
    seed: int
    ledger: object
    transcript: object
    rate_info: dict
    comparator: object | None = None
    regret: float | None = None


def run_single(
    config: ExperimentConfig, protocol: str, sigma: float, seed: int, horizon: int | None = None
) -> SingleRunResult:
    stream = make_stream(config, seed, horizon)
    domain = make_domain(config)
    mirror_map = SquaredEuclideanMap()
    schedule, rate_info, _ = _schedule_for(config, protocol, stream, domain, mirror_map, sigma)
    transcript = run_episode(protocol, stream, schedule, mirror_map, domain)
    ledger = ledger_from_transcript(transcript, stream, sigma, config.include_x0_transition)
    comparator = None
    regret = None
    if config.oracle and config.dimension <= 2:
        grid = GridSpec(domain, config.grid_points, config.budget_buckets)
        comparator = offline_optimum_dp(stream.losses(), grid, config.budget, sigma)
        regret = dynamic_regret(ledger, comparator)
    return SingleRunResult(
        protocol=protocol,
        sigma=sigma,
        seed=seed,
        ledger=ledger,
        transcript=transcript,
        rate_info=rate_info,
        comparator=comparator,
        regret=regret,
    )


def run(config: ExperimentConfig, out_dir: str | None = None) -> dict:
    """One episode per (protocol, sigma); writes ledgers, oracle outputs, manifest."""
    out = out_dir or config.out_dir
    os.makedirs(out, exist_ok=True)
    manifest: dict = {
        "config_hash": config.config_hash(),
        "config": config.to_text(),
        "master_seed": config.master_seed,
        "runs": [],
    }
    for protocol in [p.upper() for p in config.protocols]:
        for sigma in config.sigmas:
            label = f"run:{protocol}:sigma={format_sigma(sigma)}"
            seed = derive_seed(config.master_seed, label)
            result = run_single(config, protocol, sigma, seed)
            ledger_name = f"ledger_{protocol.lower()}_sigma{format_sigma(sigma)}.csv"
            _atomic_write(
                os.path.join(out, ledger_name),
                lambda tmp, lg=result.ledger: write_ledger_csv(lg, tmp),
            )
            entry = {
                "label": label,
                "seed": seed,
                "protocol": protocol,
                "sigma": sigma,
                "rate": result.rate_info,
                "ledger_csv": ledger_name,
                "player_total": result.ledger.total,
            }
            if result.comparator is not None:
                comp_name = f"comparator_{protocol.lower()}_sigma{format_sigma(sigma)}.csv"
                stream = make_stream(config, seed)
                _atomic_write(
                    os.path.join(out, comp_name),
                    lambda tmp, c=result.comparator, ls=stream.losses(): write_comparator_csv(
                        c, ls, tmp
                    ),
                )
                entry["comparator_csv"] = comp_name
                entry["comparator_total"] = result.comparator.total_cost
                entry["regret"] = result.regret
            manifest["runs"].append(entry)

    if any("regret" in e for e in manifest["runs"]):
        def write_summary(tmp):
            with open(tmp, "w", newline="", encoding="utf-8") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(REGRET_SUMMARY_HEADER)
                for e in manifest["runs"]:
                    if "regret" in e:
                        writer.writerow(
                            [
                                e["protocol"],
                                format_sigma(e["sigma"]),
                                repr(e["player_total"]),
                                repr(e["comparator_total"]),
                                repr(e["regret"]),
                            ]
                        )

        _atomic_write(os.path.join(out, "regret_summary.csv"), write_summary)

    _atomic_write(
        os.path.join(out, "manifest.json"),
        lambda tmp: _write_json(tmp, manifest),
    )
    return manifest


def _write_json(path, payload) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# Rate fitting and sweeps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RateFit:
    """Least-squares power-law fit on log2-log2 axes."""

    points: tuple[tuple[float, float], ...]
    exponent: float
    intercept: float
    residual: float
    discarded_smallest: bool = False

    @property
    def valid(self) -> bool:
        return math.isfinite(self.exponent)


def fit_exponent(points) -> RateFit:
    """OLS of log2 y on log2 x; needs >= 4 points with positive coordinates."""
    pts = [(float(x), float(y)) for x, y in points]
    if len(pts) < 4:
        raise ValueError("need at least 4 points to fit an exponent")
    if any(x <= 0 for x, _ in pts):
        raise ValueError("x values must be positive")
    bad = [(x, y) for x, y in pts if y <= 0]
    if bad:
        raise FitInvalidError(
            f"nonpositive y values make the log fit undefined: {bad}", diagnostics=pts
        )
    lx = np.log2([x for x, _ in pts])
    ly = np.log2([y for _, y in pts])
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = float(np.sum((ly - (slope * lx + intercept)) ** 2))
    return RateFit(points=tuple(pts), exponent=float(slope), intercept=float(intercept), residual=resid)


def _sweep_point(args):
    config, protocol, sigma, T, rep = args
    label = f"sweep:{protocol}:sigma={format_sigma(sigma)}:T={T}:rep={rep}"
    seed = derive_seed(config.master_seed, label)
    result = run_single(config, protocol, sigma, seed, horizon=T)
    return T, rep, result.regret


def sweep_rate(
    config: ExperimentConfig,
    protocol: str,
    sigma: float,
    out_dir: str | None = None,
    jobs: int = 1,
) -> RateFit:
    """Mean dynamic regret against the DP comparator per horizon, then a
    log-log exponent fit. Raises FitInvalidError (with per-T diagnostics)
    when a mean regret is nonpositive."""
    if len(config.horizons) < 4:
        raise ConfigError("rate sweeps need >= 4 horizons")
    if any(b <= a for a, b in zip(config.horizons, config.horizons[1:])):
        raise ConfigError("horizons must be strictly increasing")
    if not config.oracle:
        raise ConfigError("rate sweeps need the oracle enabled")
    work = [
        (config, protocol, sigma, T, rep)
        for T in config.horizons
        for rep in range(config.num_seeds)
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_point, work))
    else:
        results = [_sweep_point(w) for w in work]

    by_T: dict[int, list[float]] = {T: [] for T in config.horizons}
    for T, _, regret in results:
        by_T[T].append(regret)
    means = {T: float(np.mean(v)) for T, v in by_T.items()}
    stds = {T: float(np.std(v)) for T, v in by_T.items()}

    if out_dir:
        def write_points(tmp):
            with open(tmp, "w", newline="", encoding="utf-8") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(RATE_SWEEP_HEADER)
                for T in config.horizons:
                    writer.writerow([T, repr(means[T]), repr(stds[T]), config.num_seeds])

        name = f"ratesweep_{protocol.lower()}_sigma{format_sigma(sigma)}.csv"
        _atomic_write(os.path.join(out_dir, name), write_points)

    points = [(float(T), means[T]) for T in config.horizons]
    fit = fit_exponent(points)
    if fit.residual > RATE_FIT_RESIDUAL_THRESHOLD * len(points) and len(points) > 4:
        fit = replace(fit_exponent(points[1:]), discarded_smallest=True)
    return fit


def sweep_sigma(config: ExperimentConfig, out_dir: str | None = None) -> list[dict]:
    """Seed-mean final average switching loss for OA and OCO per sigma.

    Returns one row per sigma with keys sigma, oa_sl, oco_sl, diff
    (OCO minus OA) and writes ``sigma_summary.csv`` when out_dir is given.
    """
    if len(config.sigmas) < 1:
        raise ConfigError("need at least one sigma")
    rows = []
    for sigma in config.sigmas:
        finals = {"OA": [], "OCO": []}
        for protocol in ("OA", "OCO"):
            for rep in range(config.num_seeds):
                # one stream per rep, shared across protocols and sigmas,
                # so the OCO - OA gap is a paired comparison
                seed = derive_seed(config.master_seed, f"sigma-sweep:rep={rep}")
                result = run_single(config, protocol, sigma, seed)
                finals[protocol].append(
                    average_loss(result.ledger, result.ledger.horizon)[1]
                )
        oa_sl = float(np.mean(finals["OA"]))
        oco_sl = float(np.mean(finals["OCO"]))
        rows.append({"sigma": sigma, "oa_sl": oa_sl, "oco_sl": oco_sl, "diff": oco_sl - oa_sl})

    if out_dir:
        def write_summary(tmp):
            with open(tmp, "w", newline="", encoding="utf-8") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(SIGMA_SUMMARY_HEADER)
                for row in rows:
                    writer.writerow(
                        [
                            format_sigma(row["sigma"]),
                            repr(row["oa_sl"]),
                            repr(row["oco_sl"]),
                            repr(row["diff"]),
                        ]
                    )

        _atomic_write(os.path.join(out_dir, "sigma_summary.csv"), write_summary)
    return rows
