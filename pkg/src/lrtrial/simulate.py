"""Seeded Monte Carlo evaluation of the procedure's operating characteristics.

One master seed deterministically derives an independent substream per
trial, so summaries are bit-identical regardless of worker count.  All
Gaussian variates are generated by inversion (quantile applied to a
uniform stream), which keeps per-trial stream consumption fixed.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Sequence, Union

import numpy as np
from scipy.special import ndtri

from .engine import (
    EvidenceDirection,
    StopKind,
    TrialDesign,
    TrialResult,
    TrialStatus,
    add_observation,
    finalize,
    new_trial,
)

_EARLY_STOPS = (StopKind.STOP_HIGH, StopKind.STOP_LOW)


@dataclass(frozen=True, slots=True)
class NormalEffect:
    """True effects drawn from a normal distribution of standardized sizes."""

    mean: float = 0.0
    sd: float = 1.0

    def __post_init__(self) -> None:
        if not math.isfinite(self.mean):
            raise ValueError(f"mean must be finite, got {self.mean!r}")
        if not math.isfinite(self.sd) or self.sd <= 0.0:
            raise ValueError(f"sd must be finite and positive, got {self.sd!r}")


@dataclass(frozen=True, slots=True)
class PointMassEffect:
    """Every trial has exactly this true effect."""

    theta: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.theta):
            raise ValueError(f"theta must be finite, got {self.theta!r}")


EffectDistribution = Union[NormalEffect, PointMassEffect]


class OutcomeCategory(str, Enum):
    MISLEADING_EARLY = "misleading_early"
    CORRECT_EARLY = "correct_early"
    MISLEADING_MAX_N = "misleading_max_n"
    CORRECT_MAX_N = "correct_max_n"
    NEUTRAL_UNCLASSIFIED = "neutral_unclassified"


@dataclass(frozen=True, slots=True)
class SimulationConfig:
    design: TrialDesign
    effect_dist: EffectDistribution
    n_trials: int
    master_seed: int

    def __post_init__(self) -> None:
        if self.n_trials < 1:
            raise ValueError(f"n_trials must be >= 1, got {self.n_trials!r}")


@dataclass(frozen=True)
class SimulationSummary:
    """Aggregated batch outcome: integer counts, folded-LR means, mean n.

    Counts are kept as integers so category incidences sum to one exactly;
    mean_folded_lr is None for empty categories.
    """

    n_trials: int
    master_seed: int
    counts: dict[OutcomeCategory, int]
    mean_folded_lr: dict[OutcomeCategory, float | None]
    mean_n: float
    misleading_total: float
    config: SimulationConfig | None = None

    def incidence(self, category: OutcomeCategory) -> float:
        return self.counts[category] / self.n_trials

    @property
    def incidences(self) -> dict[OutcomeCategory, float]:
        return {cat: self.incidence(cat) for cat in OutcomeCategory}


@dataclass(frozen=True, slots=True)
class SweepPoint:
    theta_t: float
    mean_n: float
    stop_early_rate: float
    replications: int


def folded_lr(result: TrialResult) -> float:
    """max(LR, 1/LR): evidence magnitude ignoring direction."""
    try:
        return math.exp(abs(result.final_lr.log_value))
    except OverflowError:
        return math.inf


def _open_uniform(rng: np.random.Generator, size: int) -> np.ndarray:
    """Uniform draws strictly inside (0, 1), one stream draw per variate."""
    u = rng.random(size)
    # rng.random() lives in [0, 1); nudge an exact zero off the boundary
    # (probability 2^-53 per draw) so inversion stays finite.
    return np.maximum(u, 2.0 ** -54)


def draw_true_effect(effect_dist: EffectDistribution, rng: np.random.Generator) -> float:
    """One true-effect draw; PointMass consumes no stream."""
    if isinstance(effect_dist, PointMassEffect):
        return effect_dist.theta
    u = _open_uniform(rng, 1)
    return effect_dist.mean + effect_dist.sd * float(ndtri(u[0]))


def simulate_trial(
    theta_t: float, design: TrialDesign, rng: np.random.Generator
) -> TrialResult:
    """Run one trial with unit-variance observations centred at theta_t.

    Always consumes exactly n_max uniforms from the stream even when the
    trial stops early, so downstream draws do not depend on the stopping
    time.
    """
    observations = theta_t + ndtri(_open_uniform(rng, design.n_max))
    state = new_trial(design)
    for x in observations:
        state = add_observation(state, float(x))
        if state.status not in (TrialStatus.COLLECTING, TrialStatus.CONTINUE):
            break
    return finalize(state)


def classify(result: TrialResult, theta_t: float, delta: float) -> OutcomeCategory:
    """Table-style outcome category for one completed trial.

    Early means stopped by a threshold crossing; misleading means the
    final direction disagrees with the sign of theta_t - delta.
    """
    if theta_t == delta or result.evidence_direction is EvidenceDirection.NEUTRAL:
        return OutcomeCategory.NEUTRAL_UNCLASSIFIED
    early = result.stop_reason in _EARLY_STOPS
    favors_above = result.evidence_direction is EvidenceDirection.FAVORS_ABOVE
    misleading = favors_above != (theta_t > delta)
    if early:
        return OutcomeCategory.MISLEADING_EARLY if misleading else OutcomeCategory.CORRECT_EARLY
    return OutcomeCategory.MISLEADING_MAX_N if misleading else OutcomeCategory.CORRECT_MAX_N


def _run_trial(config: SimulationConfig, seed: np.random.SeedSequence) -> tuple[float, TrialResult]:
    rng = np.random.default_rng(seed)
    theta_t = draw_true_effect(config.effect_dist, rng)
    result = simulate_trial(theta_t, config.design, rng)
    return theta_t, result


def _map_ordered(fn, items: Sequence, workers: int) -> list:
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def run_batch(config: SimulationConfig, workers: int = 1) -> SimulationSummary:
    """Simulate n_trials independent trials and aggregate by category.

    Deterministic for a given master_seed at any worker count: trial i
    always uses the i-th spawned substream and aggregation runs in trial
    order with exact summation.
    """
    seeds = np.random.SeedSequence(config.master_seed).spawn(config.n_trials)
    outcomes = _map_ordered(lambda s: _run_trial(config, s), seeds, workers)

    counts = {cat: 0 for cat in OutcomeCategory}
    folded: dict[OutcomeCategory, list[float]] = {cat: [] for cat in OutcomeCategory}
    n_total = 0
    for theta_t, result in outcomes:
        category = classify(result, theta_t, config.design.delta)
        counts[category] += 1
        folded[category].append(folded_lr(result))
        n_total += result.final_n

    mean_folded = {
        cat: (math.fsum(values) / len(values) if values else None)
        for cat, values in folded.items()
    }
    misleading = counts[OutcomeCategory.MISLEADING_EARLY] + counts[OutcomeCategory.MISLEADING_MAX_N]
    return SimulationSummary(
        n_trials=config.n_trials,
        master_seed=config.master_seed,
        counts=counts,
        mean_folded_lr=mean_folded,
        mean_n=n_total / config.n_trials,
        misleading_total=misleading / config.n_trials,
        config=config,
    )


def sweep_mean_n(
    theta_grid: Sequence[float],
    design: TrialDesign,
    replications_per_point: int,
    master_seed: int,
    workers: int = 1,
) -> list[SweepPoint]:
    """Mean sample size at termination across a grid of true effects.

    Each grid point gets an independent substream family, so adding or
    reordering grid points does not perturb the others.
    """
    if len(theta_grid) == 0:
        raise ValueError("theta_grid must not be empty")
    if replications_per_point < 1:
        raise ValueError("replications_per_point must be >= 1")
    point_seeds = np.random.SeedSequence(master_seed).spawn(len(theta_grid))

    def one_point(item: tuple[float, np.random.SeedSequence]) -> SweepPoint:
        theta_t, point_seed = item
        n_values = []
        early = 0
        for seed in point_seed.spawn(replications_per_point):
            rng = np.random.default_rng(seed)
            result = simulate_trial(theta_t, design, rng)
            n_values.append(result.final_n)
            if result.stop_reason in _EARLY_STOPS:
                early += 1
        return SweepPoint(
            theta_t=float(theta_t),
            mean_n=sum(n_values) / replications_per_point,
            stop_early_rate=early / replications_per_point,
            replications=replications_per_point,
        )

    return _map_ordered(one_point, list(zip(theta_grid, point_seeds)), workers)
