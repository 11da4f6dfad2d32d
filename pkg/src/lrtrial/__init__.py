"""Sequential likelihood-ratio trial design, monitoring and simulation."""

from .engine import (
    DesignError,
    EvidenceDirection,
    StopDecision,
    StopKind,
    StoppedTrialError,
    TrialDesign,
    TrialResult,
    TrialState,
    TrialStateError,
    TrialStatus,
    add_observation,
    confidence_interval,
    evaluate_stopping,
    finalize,
    max_sample_size,
    min_sample_size,
    new_trial,
    replay,
)
from .evidence import (
    LikelihoodRatio,
    directional_lr,
    lr_from_p,
    lr_from_z,
    one_sided_p,
    p_for_lr,
    supremum_glr,
    z_for_lr,
)
from .gaussian import norm_cdf, norm_quantile, norm_sf_log
from .simulate import (
    EffectDistribution,
    NormalEffect,
    OutcomeCategory,
    PointMassEffect,
    SimulationConfig,
    SimulationSummary,
    SweepPoint,
    classify,
    draw_true_effect,
    folded_lr,
    run_batch,
    simulate_trial,
    sweep_mean_n,
)

__version__ = "0.1.0"

__all__ = [
    "DesignError",
    "EffectDistribution",
    "EvidenceDirection",
    "LikelihoodRatio",
    "NormalEffect",
    "OutcomeCategory",
    "PointMassEffect",
    "SimulationConfig",
    "SimulationSummary",
    "StopDecision",
    "StopKind",
    "StoppedTrialError",
    "SweepPoint",
    "TrialDesign",
    "TrialResult",
    "TrialState",
    "TrialStateError",
    "TrialStatus",
    "add_observation",
    "classify",
    "confidence_interval",
    "directional_lr",
    "draw_true_effect",
    "evaluate_stopping",
    "finalize",
    "folded_lr",
    "lr_from_p",
    "lr_from_z",
    "max_sample_size",
    "min_sample_size",
    "new_trial",
    "norm_cdf",
    "norm_quantile",
    "norm_sf_log",
    "one_sided_p",
    "p_for_lr",
    "replay",
    "run_batch",
    "simulate_trial",
    "supremum_glr",
    "sweep_mean_n",
    "z_for_lr",
]
