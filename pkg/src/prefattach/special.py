"""Regularized lower incomplete gamma function P(a, x).

Series expansion below ``x < a + 1``, modified-Lentz continued fraction for the
upper tail otherwise. Compiled with numba so CDF evaluation over 10^6 points
stays cheap.
"""
from __future__ import annotations

import math

import numba
import numpy as np

from .errors import ParameterError

_EPS = 1e-16
_TINY = 1e-300
_MAX_ITER = 100_000


@numba.njit(cache=True)
def _series(a, x):
    # sum_{n>=0} x^n / (a (a+1) ... (a+n))
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


@numba.njit(cache=True)
def _upper_cf(a, x):
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h


@numba.njit(cache=True)
def _gammainc_lower(a, x):
    if x <= 0.0:
        return 0.0
    if math.isinf(x):
        return 1.0
    if x < a + 1.0:
        return min(_series(a, x), 1.0)
    return max(1.0 - _upper_cf(a, x), 0.0)


@numba.njit(cache=True)
def _gammainc_lower_vec(a, xs):
    out = np.empty(xs.shape[0])
    for i in range(xs.shape[0]):
        out[i] = _gammainc_lower(a, xs[i])
    return out


def regularized_lower_incomplete_gamma(a: float, x):
    """P(a, x) = gamma(a, x) / Gamma(a) for scalar or array ``x``.

    Accurate to ~1e-13 relative for a <= 200, x <= 1e4.
    """
    if not a > 0:
        raise ParameterError(f"shape a must be positive, got {a}")
    if np.ndim(x) == 0:
        if x < 0:
            raise ParameterError(f"x must be nonnegative, got {x}")
        return float(_gammainc_lower(float(a), float(x)))
    xs = np.asarray(x, dtype=np.float64)
    if np.any(xs < 0):
        raise ParameterError("x must be nonnegative")
    flat = _gammainc_lower_vec(float(a), np.ascontiguousarray(xs.ravel()))
    return flat.reshape(xs.shape)
