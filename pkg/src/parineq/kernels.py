"""Pairwise and order-m kernels behind the G_p, H_q and Gini-type indices.

Each kernel comes in two shapes: a scalar function with argument checks
(``kernel_g_pair`` and friends) and an unchecked row function operating on a
``(k, m)`` array that returns ``k`` values. The row functions are what the
U-statistic engine calls.

Powers ``p ** d`` are never formed directly; everything goes through
``d * log(p)`` so large p or large gaps cannot overflow.
"""

from __future__ import annotations

import math
from functools import partial
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError
from .special import LOG2, log1p_exp, log_sum_exp_rows, power_mean_rows

RowKernel = Callable[[np.ndarray], np.ndarray]

FAMILIES = ("GP", "HQ", "LIMIT")


def check_p(p: float) -> float:
    p = float(p)
    if not (p > 1.0) or not math.isfinite(p):
        raise DomainError(f"p must be a finite number > 1, got {p!r}")
    return p


def check_q(q: float) -> float:
    q = float(q)
    if not (q > 0.0) or not math.isfinite(q):
        raise DomainError(f"q must be a finite number > 0, got {q!r}")
    return q


def _as_tuple(xs: Sequence[float], m_min: int = 2) -> np.ndarray:
    arr = np.asarray(xs, dtype=np.float64)
    if arr.ndim != 1 or arr.size < m_min:
        raise DomainError(f"kernel needs at least {m_min} values, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise DomainError("kernel arguments must be finite")
    return arr


def _check_nonneg(arr: np.ndarray) -> None:
    if np.any(arr < 0):
        raise DomainError("kernel arguments must be nonnegative")


def _log_cosh(y: np.ndarray) -> np.ndarray:
    a = np.abs(y)
    small = a < 1.0
    with np.errstate(over="ignore"):
        near = np.log1p(2.0 * np.sinh(np.where(small, a, 0.0) * 0.5) ** 2)
    far = a + np.log1p(np.exp(-2.0 * a)) - LOG2
    return np.where(small, near, far)


# -- row kernels -------------------------------------------------------------


def g_pair_rows(rows: np.ndarray, p: float) -> np.ndarray:
    """Pair log kernel on a ``(k, 2)`` array.

    Uses log(1 + e^t) + log(1 + e^-t) - 2 log 2 = 2 log cosh(t / 2), which has
    no cancellation as t -> 0 (p -> 1 or nearly tied pairs).
    """
    log_p = math.log(p)
    t = (rows[:, 1] - rows[:, 0]) * log_p
    return 2.0 * _log_cosh(0.5 * t) / log_p


def g_m_rows(rows: np.ndarray, p: float) -> np.ndarray:
    """Order-m log kernel; column 0 is the reference that keeps exponents small."""
    log_p = math.log(p)
    k, m = rows.shape
    t = (rows[:, 1:] - rows[:, :1]) * log_p
    if m == 2:
        t = t[:, 0]
        total = np.logaddexp(0.0, t) + np.logaddexp(0.0, -t) - 2.0 * LOG2
    else:
        zero = np.zeros((k, 1))
        upper = log_sum_exp_rows(np.hstack([zero, t]))
        lower = log_sum_exp_rows(np.hstack([zero, -t]))
        total = upper + lower - 2.0 * math.log(m)
    return np.maximum(total / log_p, 0.0)


def h_rows(rows: np.ndarray, q: float) -> np.ndarray:
    """Power-mean gap M_q - M_{-q}, row-wise, for any m >= 2."""
    if rows.shape[1] == 2:
        return _h_pair_rows(rows, q)
    return h_generic_rows(rows, q)


def h_generic_rows(rows: np.ndarray, q: float) -> np.ndarray:
    return np.maximum(power_mean_rows(rows, q) - power_mean_rows(rows, -q), 0.0)


def _h_pair_rows(rows: np.ndarray, q: float) -> np.ndarray:
    # with r = lo/hi and A = ((1 + r^q) / 2)^(1/q): M_q = hi*A and M_-q = lo/A
    hi = np.maximum(rows[:, 0], rows[:, 1])
    lo = np.minimum(rows[:, 0], rows[:, 1])
    with np.errstate(divide="ignore", invalid="ignore"):
        log_ratio = np.log(lo / hi)
    log_ratio = np.where(hi > 0, log_ratio, 0.0)
    scale = np.exp(np.log1p(0.5 * np.expm1(q * log_ratio)) / q)
    return np.maximum(hi * scale - lo / scale, 0.0)


def range_rows(rows: np.ndarray) -> np.ndarray:
    return rows.max(axis=1) - rows.min(axis=1)


def row_kernel(family: str, param: float | None = None) -> RowKernel:
    """Row kernel for an index family, any order m.

    At m == 2 this is a different code path from `pair_row_kernel`, so the
    two can be checked against each other.
    """
    if family == "GP":
        return partial(g_m_rows, p=check_p(param))
    if family == "HQ":
        return partial(h_rows, q=check_q(param))
    if family == "LIMIT":
        return range_rows
    raise DomainError(f"unknown kernel family {family!r}; expected one of {FAMILIES}")


def pair_row_kernel(family: str, param: float | None = None) -> RowKernel:
    """Dedicated m = 2 kernel for a family (the pair formulas)."""
    if family == "GP":
        return partial(g_pair_rows, p=check_p(param))
    if family == "HQ":
        return partial(h_generic_rows, q=check_q(param))
    if family == "LIMIT":
        return lambda rows: np.abs(rows[:, 1] - rows[:, 0])
    raise DomainError(f"unknown kernel family {family!r}; expected one of {FAMILIES}")


# -- scalar API --------------------------------------------------------------


def kernel_g_pair(x1: float, x2: float, p: float) -> float:
    """[log(1 + p^(x2-x1)) + log(1 + p^(x1-x2)) - 2 log 2] / log p."""
    p = check_p(p)
    arr = _as_tuple([x1, x2])
    return float(g_pair_rows(arr[None, :], p)[0])


def kernel_h_pair(x1: float, x2: float, q: float) -> float:
    """Power mean of order q minus power mean of order -q of the pair."""
    q = check_q(q)
    arr = _as_tuple([x1, x2])
    _check_nonneg(arr)
    return float(h_rows(arr[None, :], q)[0])


def kernel_g_m(xs: Sequence[float], p: float) -> float:
    """Order-m log kernel written with ``xs[0]`` as the reference observation.

    The reference cancels: the two sums are sum(p^x_i) * p^-x_0 and
    sum(p^-x_i) * p^x_0, so the kernel is symmetric in its arguments.
    Using ``xs[0]`` only keeps the exponents small.
    """
    p = check_p(p)
    arr = _as_tuple(xs)
    return float(g_m_rows(arr[None, :], p)[0])


def kernel_h_m(xs: Sequence[float], q: float) -> float:
    q = check_q(q)
    arr = _as_tuple(xs)
    _check_nonneg(arr)
    return float(h_rows(arr[None, :], q)[0])


def kernel_range(xs: Sequence[float]) -> float:
    arr = _as_tuple(xs)
    return float(arr.max() - arr.min())


def curve_T(x1: float, x2: float, p_grid: Sequence[float]) -> list[tuple[float, float]]:
    """Unnormalized log-kernel curve T(p) = log(1 + p^(x2-x1)) + log(1 + p^(x1-x2))."""
    ps = [check_p(p) for p in p_grid]
    d = float(x2) - float(x1)
    if not math.isfinite(d):
        raise DomainError("curve_T needs finite x1, x2")
    out = []
    for p in ps:
        t = d * math.log(p)
        out.append((p, log1p_exp(t) + log1p_exp(-t)))
    return out


def curve_K(x1: float, x2: float, q_grid: Sequence[float]) -> list[tuple[float, float]]:
    """Power-mean gap curve K(q) over a grid of q values."""
    return [(check_q(q), kernel_h_pair(x1, x2, q)) for q in q_grid]
