import math

import pytest

import oracles
from lrtrial import norm_cdf, norm_quantile, norm_sf_log

# Frozen from the mpmath oracle (tests/oracles.py) before the main build.
PHI_196 = 0.9750021048517796
SF_1 = 0.15865525393145705
LOG_SF_10 = -53.23128515051247
LOG_SF_M3 = -0.0013508099647481938
Q_975 = 1.959963984540054


class TestNormCdf:
    def test_zero(self):
        assert norm_cdf(0.0) == 0.5

    def test_frozen_value(self):
        assert abs(norm_cdf(1.96) - PHI_196) <= 1e-12
        assert abs(norm_cdf(1.96) - float(oracles.cdf("1.96"))) <= 1e-12

    def test_reflection(self):
        for x in (0.3, 1.0, 2.5, 4.0, 7.5):
            assert abs(norm_cdf(-x) - (1.0 - norm_cdf(x))) <= 1e-15

    def test_oracle_grid(self):
        for i in range(-80, 81):
            x = i / 10.0
            assert abs(norm_cdf(x) - float(oracles.cdf(x))) <= 1e-12

    def test_monotone(self):
        grid = [i / 50.0 for i in range(-500, 501)]
        values = [norm_cdf(x) for x in grid]
        assert all(a <= b for a, b in zip(values, values[1:]))

    @pytest.mark.parametrize("bad", [float("nan"), float("inf"), float("-inf")])
    def test_rejects_non_finite(self, bad):
        with pytest.raises(ValueError):
            norm_cdf(bad)


class TestNormSfLog:
    def test_zero(self):
        assert norm_sf_log(0.0) == math.log(0.5)

    def test_frozen_values(self):
        assert abs(norm_sf_log(10.0) - LOG_SF_10) <= 1e-9
        assert abs(norm_sf_log(-3.0) - LOG_SF_M3) <= 1e-12

    def test_deep_tail_relative_error(self):
        # |log p_hat - log p| is the relative error of exp(result).
        for x in (-40.0, -8.0, -1.0, 0.5, 3.0, 8.0, 20.0, 29.9, 30.1, 36.0, 40.0):
            assert abs(norm_sf_log(x) - float(oracles.sf_log(x))) <= 1e-10

    def test_agrees_with_one_minus_cdf(self):
        # Above |x| ~ 4.5 the subtraction 1 - cdf(x) is itself quantized
        # more coarsely than 1e-10 relative, so the bound widens with the
        # conditioning of that route (~3 float eps / tail mass).
        for i in range(-50, 51):
            x = i / 10.0
            naive = math.log(1.0 - norm_cdf(x))
            bound = max(1e-10, 3e-16 / (1.0 - norm_cdf(x)))
            assert abs(norm_sf_log(x) - naive) <= bound

    def test_agrees_with_one_minus_cdf_well_conditioned(self):
        for i in range(-45, 46):
            x = i / 10.0
            assert abs(norm_sf_log(x) - math.log(1.0 - norm_cdf(x))) <= 1e-10

    @pytest.mark.parametrize("bad", [float("nan"), float("inf")])
    def test_rejects_non_finite(self, bad):
        with pytest.raises(ValueError):
            norm_sf_log(bad)


class TestNormQuantile:
    def test_median(self):
        assert norm_quantile(0.5) == 0.0

    def test_frozen_value(self):
        assert abs(norm_quantile(0.975) - Q_975) <= 1e-9

    def test_roundtrip_through_cdf(self):
        for i in range(1, 1000):
            p = i / 1000.0
            assert abs(norm_cdf(norm_quantile(p)) - p) <= 1e-9

    def test_roundtrip_through_quantile(self):
        assert abs(norm_quantile(norm_cdf(1.234)) - 1.234) <= 1e-8

    @pytest.mark.parametrize("bad", [0.0, 1.0, -0.2, 1.3, float("nan")])
    def test_rejects_out_of_domain(self, bad):
        with pytest.raises(ValueError):
            norm_quantile(bad)
