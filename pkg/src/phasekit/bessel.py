"""Bessel functions of the first kind for real order nu >= 0 and x >= 0.

Small arguments use the ascending series.  Otherwise Miller's backward
recurrence runs down to the fractional order alpha = nu - floor(nu) and is
normalized with

    (x/2)^alpha = sum_k (alpha + 2k) Gamma(alpha + k) / k! * J_{alpha+2k}(x),

which reduces to J_0 + 2 sum J_2k = 1 at alpha = 0.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import OutOfEnvelope

MAX_ORDER = 500.0
MAX_ARG = 500.0
_RESCALE = 1e250


def _check(order: float, x: float) -> None:
    if not (0.0 <= order <= MAX_ORDER) or not (0.0 <= x <= MAX_ARG):
        raise OutOfEnvelope(f"J_{order}({x}) outside 0 <= order, x <= 500")


def bessel_j_series(order: float, x: float) -> float:
    """Ascending power series, summed until terms stop contributing."""
    if x == 0.0:
        return 1.0 if order == 0.0 else 0.0
    half = 0.5 * x
    log_t = order * math.log(half) - math.lgamma(order + 1.0)
    if log_t < -745.0:
        return 0.0
    term = math.exp(log_t)
    total = term
    q = -half * half
    k = 0
    while True:
        k += 1
        term *= q / (k * (k + order))
        total += term
        if abs(term) <= 1e-17 * abs(total) and k > half:
            return total
        if k > 2000:
            return total


def _use_series(order: float, x: float) -> bool:
    return x <= 12.0 or x * x <= 4.0 * (order + 1.0)


def _miller(alpha: float, top: int, x: float) -> np.ndarray:
    """J_{alpha+k}(x) for k = 0..top by backward recurrence, normalized."""
    m = max(top, int(x)) + 1
    start = m + int(math.sqrt(160.0 * m)) + 20
    start += start % 2
    vals = np.zeros(start + 2)
    vals[start] = 1e-300
    for k in range(start, 0, -1):
        nu = alpha + k
        vals[k - 1] = (2.0 * nu / x) * vals[k] - vals[k + 1]
        if abs(vals[k - 1]) > _RESCALE:
            vals[k - 1:] /= _RESCALE
    # normalization sum over even offsets
    if alpha == 0.0:
        weights = np.full(start // 2 + 1, 2.0)
        weights[0] = 1.0
    else:
        g = np.empty(start // 2 + 1)
        g[0] = math.gamma(alpha)
        for j in range(1, g.size):
            g[j] = g[j - 1] * (alpha + j - 1) / j
        weights = (alpha + 2.0 * np.arange(g.size)) * g
    norm = weights @ vals[0:start + 1:2]
    scale = math.exp(alpha * math.log(0.5 * x)) / norm
    return vals[:top + 1] * scale


def bessel_j(order: float, x: float) -> float:
    order = float(order)
    x = float(x)
    _check(order, x)
    if _use_series(order, x):
        return bessel_j_series(order, x)
    base = math.floor(order)
    return float(_miller(order - base, int(base), x)[-1])


def bessel_j_sequence(order: float, count: int, x: float) -> np.ndarray:
    """J_{order+k}(x) for k = 0..count-1 in one pass."""
    order = float(order)
    x = float(x)
    _check(order + count - 1, x)
    if count <= 0:
        return np.zeros(0)
    if x == 0.0:
        out = np.zeros(count)
        if order == 0.0:
            out[0] = 1.0
        return out
    if x <= 12.0:
        return np.array([bessel_j_series(order + k, x) for k in range(count)])
    base = math.floor(order)
    vals = _miller(order - base, int(base) + count - 1, x)
    out = vals[int(base):]
    # very high orders at moderate x sit in the series regime; keep them exact
    for k in range(count):
        if x * x <= 4.0 * (order + k + 1.0):
            out[k:] = [bessel_j_series(order + j, x) for j in range(k, count)]
            break
    return out
