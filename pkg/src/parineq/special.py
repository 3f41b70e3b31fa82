"""Scalar special functions and overflow-safe power means.

Everything here is pure and thread-safe. The array helpers at the bottom
(`power_mean_rows`, `log_sum_exp_rows`) are what the kernels use; the scalar
functions wrap them or stand alone.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .errors import DomainError

LOG2 = math.log(2.0)

# Beyond |t| = 40 the dropped term in log(1 + e^t) is below double resolution.
_LOG1P_EXP_CUTOFF = 40.0

_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def log1p_exp(t: float) -> float:
    """Return ``log(1 + exp(t))`` without overflow or loss of precision."""
    t = float(t)
    if not math.isfinite(t):
        raise DomainError(f"log1p_exp needs a finite argument, got {t!r}")
    if t > _LOG1P_EXP_CUTOFF:
        return t + math.log1p(math.exp(-t))
    if t < -_LOG1P_EXP_CUTOFF:
        return math.exp(t)
    return math.log1p(math.exp(t))


def power_mean(values: Sequence[float], r: float) -> float:
    """Power mean ``((sum v**r) / k) ** (1/r)`` of nonnegative values.

    The largest value (r > 0) or the smallest value (r < 0) is factored out
    before exponentiation, so huge ``|r|`` neither overflows nor underflows.
    For r < 0 a zero anywhere in ``values`` gives 0, the limit as that entry
    tends to 0 from above.

    Raises
    ------
    DomainError
        If ``values`` is empty, holds a negative or non-finite entry, or r == 0.
    """
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise DomainError("power_mean needs a nonempty 1-d sequence")
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise DomainError("power_mean needs finite nonnegative values")
    r = float(r)
    if r == 0.0 or not math.isfinite(r):
        raise DomainError(f"power_mean order must be finite and nonzero, got {r!r}")
    return float(power_mean_rows(arr[None, :], r)[0])


def power_mean_rows(rows: np.ndarray, r: float) -> np.ndarray:
    """Row-wise power mean of order ``r`` for a 2-d array of nonnegative values.

    No validation; callers own the domain checks.
    """
    rows = np.asarray(rows, dtype=np.float64)
    if r > 0:
        pivot = rows.max(axis=1)
    else:
        pivot = rows.min(axis=1)
    safe = np.where(pivot > 0, pivot, 1.0)
    # rows whose pivot is 0 produce inf/nan here and are masked at the end
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        # log difference, not log of the quotient: a subnormal pivot would
        # overflow the quotient. r * log_ratio <= 0 whenever pivot > 0.
        log_ratio = np.log(rows) - np.log(safe)[:, None]
        terms = np.expm1(r * log_ratio)
        terms = np.where(np.isnan(terms), -1.0, terms)
        scaled = np.exp(np.log1p(terms.mean(axis=1)) / r)
    return np.where(pivot > 0, pivot * scaled, 0.0)


def log_sum_exp_rows(t: np.ndarray) -> np.ndarray:
    """Row-wise ``log(sum(exp(t)))`` with the row maximum factored out."""
    t = np.asarray(t, dtype=np.float64)
    top = t.max(axis=1)
    return top + np.log(np.exp(t - top[:, None]).sum(axis=1))


def ln_gamma(x: float) -> float:
    """Natural log of the gamma function for x > 0 (Lanczos, g=7)."""
    x = float(x)
    if not (x > 0) or not math.isfinite(x):
        raise DomainError(f"ln_gamma needs x > 0, got {x!r}")
    if x < 0.5:
        # recurrence keeps the Lanczos sum in its accurate range
        return ln_gamma(x + 1.0) - math.log(x)
    z = x - 1.0
    acc = _LANCZOS_COEF[0]
    for k in range(1, len(_LANCZOS_COEF)):
        acc += _LANCZOS_COEF[k] / (z + k)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * math.log(t) - t + math.log(acc)


def digamma(x: float) -> float:
    """Digamma function for x > 0.

    Shifts up to x >= 6 with psi(x) = psi(x+1) - 1/x, then applies the
    asymptotic expansion.
    """
    x = float(x)
    if not (x > 0) or not math.isfinite(x):
        raise DomainError(f"digamma needs x > 0, got {x!r}")
    shift = 0.0
    while x < 6.0:
        shift -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    tail = inv2 * (
        1.0 / 12
        - inv2 * (1.0 / 120 - inv2 * (1.0 / 252 - inv2 * (1.0 / 240 - inv2 * (1.0 / 132))))
    )
    return shift + math.log(x) - 0.5 / x - tail


def reg_gamma_lower(a: float, x: float) -> float:
    """Regularized lower incomplete gamma function P(a, x).

    Power series below x = a + 1, Lentz continued fraction for the upper
    tail otherwise.
    """
    a = float(a)
    x = float(x)
    if not (a > 0) or not math.isfinite(a) or not (x >= 0) or math.isnan(x):
        raise DomainError(f"reg_gamma_lower needs a > 0 and x >= 0, got a={a!r}, x={x!r}")
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return 1.0
    log_prefactor = -x + a * math.log(x) - ln_gamma(a)
    if x < a + 1.0:
        term = 1.0 / a
        total = term
        ap = a
        for _ in range(10_000):
            ap += 1.0
            term *= x / ap
            total += term
            if abs(term) < abs(total) * 1e-17:
                break
        return min(1.0, total * math.exp(log_prefactor))
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 10_000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return max(0.0, 1.0 - math.exp(log_prefactor) * h)
