"""destake: decentralization metrics and non-linear stake reweighting for
proof-of-stake validator sets."""

from ._kernels import backend as kernel_backend
from .errors import (
    DestakeError,
    EmptySetError,
    InsufficientPointsError,
    InsufficientSamplesError,
    InvalidSplitError,
    NonPositiveWeightError,
    OrderingViolationError,
    ParseError,
    TooLargeError,
    ZeroStakeError,
    ZeroVarianceError,
)
from .ingest import (
    SnapshotSummary,
    parse_snapshot,
    snapshot_to_json,
    summarize_snapshot,
    write_snapshot,
)
from .metrics import (
    MetricsReport,
    epsilon_delta,
    full_report,
    gini,
    hhi,
    lorenz_curve,
    nakamoto_liveness,
    nakamoto_safety,
    zipf_fit,
)
from .model import (
    StakeSnapshot,
    ValidatorRecord,
    WeightScheme,
    WeightVector,
    compute_weights,
    quorum_threshold,
)
from .report import ComparisonReport, build_comparison, compare_snapshot
from .rewards import (
    RewardParams,
    SybilAnalysis,
    check_split_inequality,
    epoch_rewards,
    select_validator_set,
    sybil_split_analysis,
)
from .shapley import (
    ShapleyResult,
    VotingGame,
    shapley_exact,
    shapley_gini,
    shapley_sampled,
    stake_shapley_correlation,
)
from .simulate import (
    SimulationConfig,
    SimulationTrace,
    run_compounding,
    sample_proposers,
)

__version__ = "0.1.0"

__all__ = [
    "ComparisonReport",
    "DestakeError",
    "EmptySetError",
    "InsufficientPointsError",
    "InsufficientSamplesError",
    "InvalidSplitError",
    "MetricsReport",
    "NonPositiveWeightError",
    "OrderingViolationError",
    "ParseError",
    "RewardParams",
    "ShapleyResult",
    "SimulationConfig",
    "SimulationTrace",
    "SnapshotSummary",
    "StakeSnapshot",
    "SybilAnalysis",
    "TooLargeError",
    "ValidatorRecord",
    "VotingGame",
    "WeightScheme",
    "WeightVector",
    "ZeroStakeError",
    "ZeroVarianceError",
    "build_comparison",
    "check_split_inequality",
    "compare_snapshot",
    "compute_weights",
    "epoch_rewards",
    "epsilon_delta",
    "full_report",
    "gini",
    "hhi",
    "kernel_backend",
    "lorenz_curve",
    "nakamoto_liveness",
    "nakamoto_safety",
    "parse_snapshot",
    "quorum_threshold",
    "run_compounding",
    "sample_proposers",
    "select_validator_set",
    "shapley_exact",
    "shapley_gini",
    "shapley_sampled",
    "snapshot_to_json",
    "stake_shapley_correlation",
    "summarize_snapshot",
    "sybil_split_analysis",
    "write_snapshot",
    "zipf_fit",
]
