"""The sequential trial procedure: design calibration and state machine.

A design fixes the dividing value, the stopping thresholds and the derived
minimum / maximum sample sizes.  Observations are standardized draws with
known unit variance, so after n of them the running mean has standard
error 1/sqrt(n).  Evidence is re-evaluated after every observation, but
stopping is suppressed until the minimum sample size: small filtered
samples over-estimate the true effect.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable

from .evidence import LikelihoodRatio, directional_lr


class TrialStatus(str, Enum):
    COLLECTING = "collecting"  # n below the minimum sample size
    CONTINUE = "continue"
    STOPPED_HIGH = "stopped_high"
    STOPPED_LOW = "stopped_low"
    STOPPED_MAX_N = "stopped_max_n"


class StopKind(str, Enum):
    CONTINUE = "continue"
    STOP_HIGH = "stop_high"
    STOP_LOW = "stop_low"
    STOP_MAX_N = "stop_max_n"


class EvidenceDirection(str, Enum):
    FAVORS_ABOVE = "favors_above_delta"
    FAVORS_BELOW = "favors_below_delta"
    NEUTRAL = "neutral"


STOPPED_STATUSES = frozenset(
    {TrialStatus.STOPPED_HIGH, TrialStatus.STOPPED_LOW, TrialStatus.STOPPED_MAX_N}
)

_STATUS_FOR_STOP = {
    StopKind.STOP_HIGH: TrialStatus.STOPPED_HIGH,
    StopKind.STOP_LOW: TrialStatus.STOPPED_LOW,
    StopKind.STOP_MAX_N: TrialStatus.STOPPED_MAX_N,
}

_STOP_FOR_STATUS = {v: k for k, v in _STATUS_FOR_STOP.items()}


class DesignError(ValueError):
    """Invalid trial design; carries one (field, message) pair per violation."""

    def __init__(self, problems: list[tuple[str, str]]):
        self.problems = problems
        super().__init__("; ".join(f"{f}: {m}" for f, m in problems))


class StoppedTrialError(RuntimeError):
    """An observation arrived after the trial already stopped."""


class TrialStateError(RuntimeError):
    """Operation called on a state that cannot support it."""


def min_sample_size(delta: float, z_crit: float) -> int:
    """Smallest n whose confidence interval is narrower than twice delta.

    ceil((z_crit / delta)^2); keeps the interval from covering the
    dividing value in both directions at once.
    """
    _check_positive("delta", delta)
    _check_positive("z_crit", z_crit)
    return math.ceil((z_crit / delta) ** 2)


def max_sample_size(delta: float, z_crit: float) -> int:
    """Largest n worth collecting: interval width down to delta itself.

    ceil((2 * z_crit / delta)^2), four times the unrounded minimum.
    """
    _check_positive("delta", delta)
    _check_positive("z_crit", z_crit)
    return math.ceil((2.0 * z_crit / delta) ** 2)


def _check_positive(name: str, x: float) -> None:
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise ValueError(f"{name} must be finite and positive, got {x!r}")


def validate_design_fields(
    delta: float, lr_upper: float, lr_lower: float, z_crit: float
) -> list[tuple[str, str]]:
    """Collect every violated design invariant (empty list when valid)."""
    problems: list[tuple[str, str]] = []
    if not math.isfinite(delta) or delta <= 0.0:
        problems.append(("delta", f"must be finite and positive, got {delta!r}"))
    if not math.isfinite(lr_upper) or lr_upper <= 1.0:
        problems.append(("lr_upper", f"must be finite and > 1, got {lr_upper!r}"))
    if not math.isfinite(lr_lower) or not 0.0 < lr_lower < 1.0:
        problems.append(("lr_lower", f"must lie strictly inside (0, 1), got {lr_lower!r}"))
    if not math.isfinite(z_crit) or z_crit <= 0.0:
        problems.append(("z_crit", f"must be finite and positive, got {z_crit!r}"))
    return problems


@dataclass(frozen=True, slots=True)
class TrialDesign:
    """Immutable contract of one trial.

    delta is the minimum clinically significant effect size in
    standardized per-observation units; lr_upper / lr_lower are the
    stopping thresholds (defaults 20 and 1/20, independently settable);
    z_crit is the critical value used for the interval calibration.
    n_min and n_max are derived.
    """

    delta: float
    lr_upper: float = 20.0
    lr_lower: float = 0.05
    z_crit: float = 1.96
    label: str = ""
    n_min: int = field(init=False)
    n_max: int = field(init=False)

    def __post_init__(self) -> None:
        problems = validate_design_fields(self.delta, self.lr_upper, self.lr_lower, self.z_crit)
        if problems:
            raise DesignError(problems)
        object.__setattr__(self, "n_min", min_sample_size(self.delta, self.z_crit))
        object.__setattr__(self, "n_max", max_sample_size(self.delta, self.z_crit))


@dataclass(frozen=True, slots=True)
class StopDecision:
    kind: StopKind
    lr_at_decision: LikelihoodRatio
    n_at_decision: int


@dataclass(frozen=True, slots=True)
class TrialState:
    """Value snapshot of a running trial; updates produce new values."""

    design: TrialDesign
    n: int
    sum: float
    sum_sq: float
    theta_obs: float | None
    se: float | None
    lr: LikelihoodRatio | None
    status: TrialStatus


@dataclass(frozen=True, slots=True)
class TrialResult:
    """Terminal snapshot of one trial."""

    final_lr: LikelihoodRatio
    final_n: int
    theta_obs_final: float
    stop_reason: StopKind
    evidence_direction: EvidenceDirection


def new_trial(design: TrialDesign) -> TrialState:
    return TrialState(
        design=design,
        n=0,
        sum=0.0,
        sum_sq=0.0,
        theta_obs=None,
        se=None,
        lr=None,
        status=TrialStatus.COLLECTING,
    )


def _stop_kind(design: TrialDesign, n: int, log_lr: float) -> StopKind:
    if n < design.n_min:
        return StopKind.CONTINUE
    if log_lr >= math.log(design.lr_upper):
        return StopKind.STOP_HIGH
    if log_lr <= math.log(design.lr_lower):
        return StopKind.STOP_LOW
    if n >= design.n_max:
        return StopKind.STOP_MAX_N
    return StopKind.CONTINUE


def add_observation(state: TrialState, x: float) -> TrialState:
    """Fold one observation into the trial and re-evaluate stopping."""
    if state.status in STOPPED_STATUSES:
        raise StoppedTrialError(
            f"trial already stopped ({state.status.value}) at n={state.n}"
        )
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"observation must be finite, got {x!r}")
    design = state.design
    n = state.n + 1
    total = state.sum + x
    total_sq = state.sum_sq + x * x
    theta_obs = total / n
    se = 1.0 / math.sqrt(n)
    lr = directional_lr(theta_obs, design.delta, se)
    kind = _stop_kind(design, n, lr.log_value)
    if kind is StopKind.CONTINUE:
        status = TrialStatus.COLLECTING if n < design.n_min else TrialStatus.CONTINUE
    else:
        status = _STATUS_FOR_STOP[kind]
    return TrialState(
        design=design,
        n=n,
        sum=total,
        sum_sq=total_sq,
        theta_obs=theta_obs,
        se=se,
        lr=lr,
        status=status,
    )


def evaluate_stopping(state: TrialState) -> StopDecision:
    """Stopping decision for the current state (Continue below n_min)."""
    if state.n < 1 or state.lr is None:
        raise TrialStateError("stopping is undefined before the first observation")
    kind = _stop_kind(state.design, state.n, state.lr.log_value)
    return StopDecision(kind=kind, lr_at_decision=state.lr, n_at_decision=state.n)


def confidence_interval(state: TrialState) -> tuple[float, float]:
    """Central interval theta_obs +/- z_crit / sqrt(n)."""
    if state.n < 1 or state.theta_obs is None or state.se is None:
        raise TrialStateError("confidence interval is undefined before the first observation")
    half = state.design.z_crit * state.se
    return (state.theta_obs - half, state.theta_obs + half)


def finalize(state: TrialState) -> TrialResult:
    """Terminal summary; only valid once the trial has stopped."""
    if state.status not in STOPPED_STATUSES:
        raise TrialStateError(f"trial has not stopped (status {state.status.value})")
    assert state.lr is not None and state.theta_obs is not None
    log_lr = state.lr.log_value
    if log_lr > 0.0:
        direction = EvidenceDirection.FAVORS_ABOVE
    elif log_lr < 0.0:
        direction = EvidenceDirection.FAVORS_BELOW
    else:
        direction = EvidenceDirection.NEUTRAL
    return TrialResult(
        final_lr=state.lr,
        final_n=state.n,
        theta_obs_final=state.theta_obs,
        stop_reason=_STOP_FOR_STATUS[state.status],
        evidence_direction=direction,
    )


def replay(design: TrialDesign, observations: Iterable[float]) -> TrialState:
    """Rebuild a state by feeding observations from scratch.

    Raises StoppedTrialError if the sequence continues past a stop, which
    signals a corrupt observation log.
    """
    state = new_trial(design)
    for x in observations:
        state = add_observation(state, x)
    return state
