"""Online decision making under switching costs.

Mirror-descent players for the observe-then-act (OA) and act-then-observe
(OCO) protocols, cost ledgers with a generalized movement penalty, a
budget-constrained offline comparator computed by dynamic programming, and
a seeded experiment harness.
"""

from .algorithms import (
    ConstantRate,
    EpisodeTranscript,
    SqrtDecayRate,
    heuristic_tune,
    md_oa_step,
    md_oco_step,
    oa_theory_rate,
    oco_theory_rate,
    run_episode,
)
from .cost import (
    CostLedger,
    average_loss,
    dynamic_regret,
    ledger_from_transcript,
    switching_cost,
    write_ledger_csv,
)
from .errors import (
    ConfigError,
    FitInvalidError,
    NumericalError,
    ProtocolError,
    ResourceLimitError,
    SwitchmdError,
    TuningFailureError,
)
from .geometry import (
    Ball,
    Box,
    NegativeEntropyMap,
    Simplex,
    SquaredEuclideanMap,
    bregman_divergence,
    mirror_argmin,
    mirror_argmin_pgd,
)
from .harness import (
    ExperimentConfig,
    RateFit,
    derive_seed,
    fit_exponent,
    load_config,
    parse_config_text,
    run,
    run_single,
    sweep_rate,
    sweep_sigma,
)
from .losses import LinearLoss, LogisticLoss, ProblemConstants, estimate_constants
from .oracle import (
    ComparatorPath,
    GridSpec,
    exhaustive_optimum,
    lower_bound_comparator,
    offline_optimum_dp,
    write_comparator_csv,
)
from .streams import (
    CsvStream,
    DriftingLogisticStream,
    DriftSchedule,
    ListStream,
    RademacherStream,
    alternating_flip_schedule,
    load_csv_stream,
    save_stream_csv,
    two_segment_flip_schedule,
)

__version__ = "0.1.0"
