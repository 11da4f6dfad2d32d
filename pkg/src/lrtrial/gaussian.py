"""Scalar standard-normal primitives.

The survival function is exposed in log space so that extreme tails stay
meaningful: the linear upper tail underflows to zero near x ~ 38, long
before the procedure's math stops being well defined.
"""

from __future__ import annotations

import math

from scipy.special import log_ndtr, ndtri

_SQRT2 = math.sqrt(2.0)

# erfc(x/sqrt(2)) underflows around x ~ 37.6; switch to the asymptotic
# log-survival implementation well before that.
_ERFC_LIMIT = 30.0


def _require_finite(name: str, x: float) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"{name} must be finite, got {x!r}")
    return x


def norm_cdf(x: float) -> float:
    """Standard normal CDF, absolute error below 1e-12."""
    x = _require_finite("x", x)
    return 0.5 * math.erfc(-x / _SQRT2)


def norm_sf_log(x: float) -> float:
    """Natural log of the upper tail probability 1 - CDF(x)."""
    x = _require_finite("x", x)
    if x < _ERFC_LIMIT:
        return math.log(0.5 * math.erfc(x / _SQRT2))
    return float(log_ndtr(-x))


def norm_quantile(p: float) -> float:
    """Inverse of norm_cdf on (0, 1)."""
    p = float(p)
    if math.isnan(p) or not 0.0 < p < 1.0:
        raise ValueError(f"p must lie strictly inside (0, 1), got {p!r}")
    return float(ndtri(p))
