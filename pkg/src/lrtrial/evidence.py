"""Directional likelihood ratios against a dividing hypothesis.

The evidence measure is a one-sided p-value converted into a likelihood
ratio,

    LR = 0.25 / (p - p^2),

reported in the direction of the observed effect: the ratio itself when
the observed effect lies above the dividing value, its inverse otherwise.
All arithmetic happens in log space; linear values are materialised only
at presentation boundaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .gaussian import norm_quantile, norm_sf_log

# p-values are clamped into this window before conversion so that
# floating-point underflow at extreme standardized effects can never
# produce a literal zero.  The bounds are far outside anything reachable
# at realistic sample sizes.
P_MIN = 1e-300
P_MAX = 1.0 - 1e-16

_LOG_P_MIN = math.log(P_MIN)
_LOG_QUARTER = math.log(0.25)


@dataclass(frozen=True, slots=True)
class LikelihoodRatio:
    """A likelihood ratio stored as its natural log.

    Keeping the log is what makes "LR > 20" checks and deep-tail values
    exact and overflow-free; ``value`` is for display.
    """

    log_value: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.log_value):
            raise ValueError(f"log_value must be finite, got {self.log_value!r}")

    @property
    def value(self) -> float:
        try:
            return math.exp(self.log_value)
        except OverflowError:
            return math.inf

    @property
    def inverse(self) -> "LikelihoodRatio":
        return LikelihoodRatio(-self.log_value)

    @classmethod
    def from_linear(cls, value: float) -> "LikelihoodRatio":
        value = float(value)
        if not math.isfinite(value) or value <= 0.0:
            raise ValueError(f"linear LR must be finite and positive, got {value!r}")
        return cls(math.log(value))


def _standardize(theta_obs: float, delta: float, se: float) -> float:
    theta_obs = float(theta_obs)
    delta = float(delta)
    se = float(se)
    if not (math.isfinite(theta_obs) and math.isfinite(delta)):
        raise ValueError("theta_obs and delta must be finite")
    if not math.isfinite(se) or se <= 0.0:
        raise ValueError(f"se must be finite and positive, got {se!r}")
    return (theta_obs - delta) / se


def one_sided_p(theta_obs: float, delta: float, se: float) -> float:
    """Upper-tail p-value against the dividing hypothesis.

    Returns 1 - CDF((theta_obs - delta) / se), computed through the log
    survival function and clamped to [P_MIN, P_MAX].  p < 0.5 exactly when
    theta_obs > delta.
    """
    z = _standardize(theta_obs, delta, se)
    if z == 0.0:
        return 0.5
    p = math.exp(norm_sf_log(z))
    return min(max(p, P_MIN), P_MAX)


def lr_from_p(p: float) -> LikelihoodRatio:
    """Convert a one-sided p-value into the (non-directional) ratio.

    Since p - p^2 <= 0.25 the result is always >= 1, with equality at
    p = 0.5, and it is invariant under p <-> 1-p.
    """
    p = float(p)
    if math.isnan(p) or not 0.0 < p < 1.0:
        raise ValueError(f"p must lie strictly inside (0, 1), got {p!r}")
    log_lr = _LOG_QUARTER - math.log(p) - math.log1p(-p)
    return LikelihoodRatio(max(log_lr, 0.0))


def p_for_lr(lr: float) -> float:
    """Lower root of the conversion formula: the p at which the ratio equals lr.

    Inverse companion of :func:`lr_from_p` on the p <= 0.5 branch, used to
    express stopping thresholds as p and z equivalents.
    """
    lr = float(lr)
    if not math.isfinite(lr) or lr <= 1.0:
        raise ValueError(f"lr must be finite and > 1, got {lr!r}")
    # Stable form of (1 - sqrt(1 - 1/lr)) / 2.
    return 0.5 / (lr * (1.0 + math.sqrt(1.0 - 1.0 / lr)))


def z_for_lr(lr: float) -> float:
    """Standardized effect at which the directional ratio reaches lr (> 1)."""
    return norm_quantile(1.0 - p_for_lr(lr))


def directional_lr(theta_obs: float, delta: float, se: float) -> LikelihoodRatio:
    """Directional likelihood ratio for the observed effect.

    Greater than 1 iff theta_obs > delta; the values at delta + d and
    delta - d are exact inverses of each other.
    """
    z = _standardize(theta_obs, delta, se)
    if z == 0.0:
        return LikelihoodRatio(0.0)
    az = abs(z)
    log_p = max(norm_sf_log(az), _LOG_P_MIN)
    log_1mp = norm_sf_log(-az)
    magnitude = _LOG_QUARTER - log_p - log_1mp
    if magnitude < 0.0:  # cancellation noise for z ~ 1e-8
        magnitude = 0.0
    return LikelihoodRatio(magnitude if z > 0.0 else -magnitude)


def lr_from_z(z: float, delta_std: float) -> LikelihoodRatio:
    """Ratio for a standardized effect z against a dividing value delta_std.

    Both arguments must be expressed in the same standard-error units.
    Identical to lr_from_p(one_sided_p(z, delta_std, 1)); callers apply
    directionality from the sign of z - delta_std.
    """
    z = float(z)
    delta_std = float(delta_std)
    if not (math.isfinite(z) and math.isfinite(delta_std)):
        raise ValueError("z and delta_std must be finite")
    return lr_from_p(one_sided_p(z, delta_std, 1.0))


def supremum_glr(theta_obs: float, delta: float, se: float) -> LikelihoodRatio:
    """Generalised likelihood ratio between the two half-lines at delta.

    For a normal likelihood the supremum on the observed side sits at the
    observed effect and on the other side at delta, giving exp(z^2 / 2)
    with the same directional sign convention as :func:`directional_lr`.
    Diagnostic only; the stopping rule never uses this quantity.
    """
    z = _standardize(theta_obs, delta, se)
    return LikelihoodRatio(math.copysign(0.5 * z * z, z))
