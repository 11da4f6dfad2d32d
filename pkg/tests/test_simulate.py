import math

import numpy as np
import pytest
from scipy import stats

from lrtrial import (
    EvidenceDirection,
    NormalEffect,
    OutcomeCategory,
    PointMassEffect,
    SimulationConfig,
    StopKind,
    TrialDesign,
    classify,
    draw_true_effect,
    folded_lr,
    run_batch,
    simulate_trial,
    sweep_mean_n,
)
from lrtrial.engine import TrialResult
from lrtrial.evidence import LikelihoodRatio


def rng_from(seed):
    return np.random.default_rng(np.random.SeedSequence(seed))


def make_result(log_lr, n, stop_reason):
    if log_lr > 0:
        direction = EvidenceDirection.FAVORS_ABOVE
    elif log_lr < 0:
        direction = EvidenceDirection.FAVORS_BELOW
    else:
        direction = EvidenceDirection.NEUTRAL
    return TrialResult(
        final_lr=LikelihoodRatio(log_lr),
        final_n=n,
        theta_obs_final=0.0,
        stop_reason=stop_reason,
        evidence_direction=direction,
    )


class TestEffectDistributions:
    def test_point_mass_is_exact(self):
        rng = rng_from(0)
        assert all(draw_true_effect(PointMassEffect(0.5), rng) == 0.5 for _ in range(100))

    def test_point_mass_consumes_no_stream(self):
        a, b = rng_from(1), rng_from(1)
        draw_true_effect(PointMassEffect(2.0), a)
        assert a.random() == b.random()

    def test_invalid_parameters(self):
        with pytest.raises(ValueError):
            NormalEffect(sd=0.0)
        with pytest.raises(ValueError):
            NormalEffect(mean=float("nan"))
        with pytest.raises(ValueError):
            PointMassEffect(float("inf"))

    def test_normal_sample_statistics(self):
        rng = rng_from(2)
        dist = NormalEffect(0.0, 1.0)
        draws = np.array([draw_true_effect(dist, rng) for _ in range(100_000)])
        assert abs(draws.mean()) <= 0.02  # 3 sigma/sqrt(N) ~ 0.0095
        assert abs((draws > 0.5).mean() - 0.3085) <= 0.01
        _, p_value = stats.kstest(draws, "norm")
        assert p_value > 0.01

    def test_normal_location_scale(self):
        rng = rng_from(3)
        dist = NormalEffect(2.0, 0.5)
        draws = np.array([draw_true_effect(dist, rng) for _ in range(20_000)])
        assert abs(draws.mean() - 2.0) <= 0.02
        assert abs(draws.std() - 0.5) <= 0.01


class TestSimulateTrial:
    def test_huge_effect_stops_high_at_n_min(self, reference_design):
        stopped_high_at_min = 0
        for seed in range(10_000):
            result = simulate_trial(10.0, reference_design, rng_from(seed))
            if result.stop_reason is StopKind.STOP_HIGH and result.final_n == 16:
                stopped_high_at_min += 1
        assert stopped_high_at_min / 10_000 > 0.999

    def test_at_divide_mostly_max_n(self, reference_design):
        max_n = sum(
            simulate_trial(0.5, reference_design, rng_from(seed)).stop_reason
            is StopKind.STOP_MAX_N
            for seed in range(2_000)
        )
        assert max_n / 2_000 >= 0.60

    def test_bounds(self, reference_design):
        for seed in range(200):
            result = simulate_trial(0.3, reference_design, rng_from(seed))
            assert reference_design.n_min <= result.final_n <= reference_design.n_max

    def test_deterministic_for_fixed_stream(self, reference_design):
        a = simulate_trial(0.2, reference_design, rng_from(99))
        b = simulate_trial(0.2, reference_design, rng_from(99))
        assert a == b

    def test_fixed_stream_consumption(self, reference_design):
        # Early stop or not, the trial consumes exactly n_max uniforms.
        a = rng_from(4)
        simulate_trial(10.0, reference_design, a)  # stops at n_min
        b = rng_from(4)
        simulate_trial(0.5, reference_design, b)  # runs to n_max
        assert a.random() == b.random()


class TestClassify:
    def test_misleading_early(self):
        result = make_result(math.log(25.0), 20, StopKind.STOP_HIGH)
        assert classify(result, -0.3, 0.5) is OutcomeCategory.MISLEADING_EARLY

    def test_correct_max_n(self):
        result = make_result(math.log(0.4), 64, StopKind.STOP_MAX_N)
        assert classify(result, 0.2, 0.5) is OutcomeCategory.CORRECT_MAX_N

    def test_misleading_max_n(self):
        result = make_result(math.log(1.8), 64, StopKind.STOP_MAX_N)
        assert classify(result, 0.2, 0.5) is OutcomeCategory.MISLEADING_MAX_N

    def test_correct_early_both_sides(self):
        high = make_result(math.log(30.0), 18, StopKind.STOP_HIGH)
        low = make_result(math.log(0.03), 18, StopKind.STOP_LOW)
        assert classify(high, 1.2, 0.5) is OutcomeCategory.CORRECT_EARLY
        assert classify(low, -0.7, 0.5) is OutcomeCategory.CORRECT_EARLY

    def test_neutral_cases(self):
        at_divide = make_result(math.log(1.8), 64, StopKind.STOP_MAX_N)
        assert classify(at_divide, 0.5, 0.5) is OutcomeCategory.NEUTRAL_UNCLASSIFIED
        neutral_lr = make_result(0.0, 64, StopKind.STOP_MAX_N)
        assert classify(neutral_lr, 0.2, 0.5) is OutcomeCategory.NEUTRAL_UNCLASSIFIED


class TestRunBatch:
    def _config(self, reference_design, n_trials=600, seed=11):
        return SimulationConfig(
            design=reference_design,
            effect_dist=NormalEffect(0.0, 1.0),
            n_trials=n_trials,
            master_seed=seed,
        )

    def test_counts_are_exhaustive_integers(self, reference_design):
        summary = run_batch(self._config(reference_design))
        assert sum(summary.counts.values()) == summary.n_trials
        assert all(isinstance(c, int) for c in summary.counts.values())
        assert abs(sum(summary.incidences.values()) - 1.0) <= 1e-12

    def test_mean_n_in_bounds(self, reference_design):
        summary = run_batch(self._config(reference_design))
        assert reference_design.n_min <= summary.mean_n <= reference_design.n_max

    def test_seed_determinism(self, reference_design):
        a = run_batch(self._config(reference_design))
        b = run_batch(self._config(reference_design))
        assert a == b

    def test_worker_count_does_not_change_results(self, reference_design):
        serial = run_batch(self._config(reference_design), workers=1)
        threaded = run_batch(self._config(reference_design), workers=4)
        assert serial == threaded

    def test_different_seeds_differ(self, reference_design):
        a = run_batch(self._config(reference_design, seed=1))
        b = run_batch(self._config(reference_design, seed=2))
        assert a.counts != b.counts or a.mean_n != b.mean_n

    def test_early_stops_have_folded_lr_at_threshold(self, reference_design):
        config = self._config(reference_design, n_trials=400, seed=5)
        seeds = np.random.SeedSequence(config.master_seed).spawn(config.n_trials)
        for seed in seeds:
            rng = np.random.default_rng(seed)
            theta = draw_true_effect(config.effect_dist, rng)
            result = simulate_trial(theta, config.design, rng)
            if result.stop_reason in (StopKind.STOP_HIGH, StopKind.STOP_LOW):
                assert folded_lr(result) >= 20.0

    def test_point_mass_far_from_divide(self, reference_design):
        config = SimulationConfig(
            design=reference_design,
            effect_dist=PointMassEffect(10.0),
            n_trials=400,
            master_seed=3,
        )
        summary = run_batch(config)
        assert summary.incidence(OutcomeCategory.CORRECT_EARLY) == 1.0
        assert summary.mean_n == reference_design.n_min

    def test_config_echo(self, reference_design):
        config = self._config(reference_design)
        assert run_batch(config).config == config

    def test_rejects_zero_trials(self, reference_design):
        with pytest.raises(ValueError):
            SimulationConfig(
                design=reference_design,
                effect_dist=NormalEffect(),
                n_trials=0,
                master_seed=0,
            )


class TestSweep:
    def test_one_point_per_grid_value(self, reference_design):
        points = sweep_mean_n([-0.5, 0.0, 0.5], reference_design, 50, master_seed=7)
        assert [p.theta_t for p in points] == [-0.5, 0.0, 0.5]
        assert all(p.replications == 50 for p in points)
        assert all(
            reference_design.n_min <= p.mean_n <= reference_design.n_max for p in points
        )

    def test_determinism_and_workers(self, reference_design):
        a = sweep_mean_n([0.0, 0.5], reference_design, 60, master_seed=8)
        b = sweep_mean_n([0.0, 0.5], reference_design, 60, master_seed=8, workers=3)
        assert a == b

    def test_far_points_stop_at_n_min(self, reference_design):
        points = sweep_mean_n([-1.5, 2.5], reference_design, 200, master_seed=9)
        for point in points:
            assert abs(point.mean_n - reference_design.n_min) <= 0.1 * reference_design.n_min
            assert point.stop_early_rate == 1.0

    def test_divide_point_near_n_max(self, reference_design):
        (point,) = sweep_mean_n([0.5], reference_design, 500, master_seed=10)
        assert point.mean_n >= 0.9 * reference_design.n_max

    def test_rejects_empty_grid(self, reference_design):
        with pytest.raises(ValueError):
            sweep_mean_n([], reference_design, 10, master_seed=1)
