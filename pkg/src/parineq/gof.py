"""Gamma maximum-likelihood fit and KS / Cramer-von Mises goodness of fit.

Because the gamma parameters are estimated from the data, the usual
asymptotic null distributions of both statistics do not apply. P-values come
from a parametric bootstrap that refits on every resample.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np
from scipy import special as sps

from .errors import ConvergenceError, DataError, DomainError
from .parallel import ordered_map
from .rng import DistSpec, RngState, sample_gamma, split
from .special import digamma
from .ustat import Sample, as_sample

MAX_NEWTON_STEPS = 50


def _trigamma(x: float) -> float:
    acc = 0.0
    # recurrence up to x >= 10, then the Bernoulli asymptotic series
    while x < 10.0:
        acc += 1.0 / (x * x)
        x += 1.0
    inv = 1.0 / x
    inv2 = inv * inv
    tail = 1.0 / 42 - inv2 * (1.0 / 30 - inv2 * (5.0 / 66 - inv2 * 691.0 / 2730))
    return acc + inv + 0.5 * inv2 + inv * inv2 * (1.0 / 6 - inv2 * (1.0 / 30 - inv2 * tail))


def fit_gamma_mle(sample) -> tuple[float, float]:
    """Maximum-likelihood ``(shape, scale)`` of a gamma model.

    Solves ``log(a) - digamma(a) = log(mean) - mean(log x)`` by Newton's
    method from the usual closed-form starting point; ``scale = mean / a``.
    """
    x = np.asarray(sample.values if isinstance(sample, Sample) else sample, dtype=np.float64).ravel()
    if x.size < 3:
        raise DataError(f"gamma fit needs n >= 3, got {x.size}")
    if not np.all(np.isfinite(x)) or np.any(x <= 0):
        raise DomainError("gamma fit needs strictly positive finite data (log of a nonpositive value)")
    mean = math.fsum(x) / x.size
    s = math.log(mean) - math.fsum(np.log(x)) / x.size
    if not s > 0:
        raise DomainError("gamma fit is undefined for a sample without spread")
    a = (3.0 - s + math.sqrt((s - 3.0) ** 2 + 24.0 * s)) / (12.0 * s)
    trace = [a]
    for _ in range(MAX_NEWTON_STEPS):
        f = math.log(a) - digamma(a) - s
        fprime = 1.0 / a - _trigamma(a)
        step = f / fprime
        a_new = a - step
        if a_new <= 0:
            a_new = a / 2.0
        trace.append(a_new)
        if abs(a_new - a) < 1e-10 * max(1.0, a):
            return a_new, mean / a_new
        a = a_new
    raise ConvergenceError("gamma shape Newton iteration did not converge", trace)


def gamma_cdf(shape: float, scale: float) -> Callable[[np.ndarray], np.ndarray]:
    def cdf(x):
        return sps.gammainc(shape, np.asarray(x, dtype=np.float64) / scale)

    return cdf


def _cdf_sorted(values, cdf) -> tuple[np.ndarray, int]:
    x = np.sort(np.asarray(values, dtype=np.float64), kind="stable")
    f = np.asarray(cdf(x), dtype=np.float64)
    if f.shape != x.shape:
        f = np.array([cdf(v) for v in x], dtype=np.float64)
    return f, x.size


def ks_statistic(values, cdf) -> float:
    """Kolmogorov-Smirnov distance between the empirical CDF and ``cdf``."""
    f, n = _cdf_sorted(values, cdf)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))


def cvm_statistic(values, cdf) -> float:
    """Cramer-von Mises W^2 against ``cdf``."""
    f, n = _cdf_sorted(values, cdf)
    i = np.arange(1, n + 1)
    return 1.0 / (12 * n) + math.fsum((f - (2 * i - 1) / (2 * n)) ** 2)


def empirical_pvalue(observed: float, replicates) -> float:
    """``(1 + #{replicate >= observed}) / (B + 1)``; never 0."""
    reps = np.asarray(replicates, dtype=np.float64)
    return (1 + int(np.count_nonzero(reps >= observed))) / (reps.size + 1)


@dataclass(frozen=True)
class GofReport:
    n: int
    shape_hat: float
    scale_hat: float
    ks_stat: float
    cvm_stat: float
    ks_pvalue: float
    cvm_pvalue: float
    bootstrap_B: int
    failed_refits: int = 0

    def to_record(self) -> dict:
        return asdict(self)


def _fit_stats(x):
    shape, scale = fit_gamma_mle(x)
    cdf = gamma_cdf(shape, scale)
    return ks_statistic(x, cdf), cvm_statistic(x, cdf)


def bootstrap_pvalues(sample, B: int, rng: RngState, threads: int = 1) -> GofReport:
    """Fit, test, and calibrate both statistics by parametric bootstrap.

    Resample b is drawn from ``split(rng, b)``; if its refit fails it is
    redrawn from a further split, up to ``10 * B`` attempts in total.
    """
    if B < 99:
        raise DomainError(f"bootstrap needs B >= 99 replicates, got {B}")
    x = as_sample(sample).values
    n = x.size
    shape, scale = fit_gamma_mle(x)
    cdf = gamma_cdf(shape, scale)
    ks_obs = ks_statistic(x, cdf)
    cvm_obs = cvm_statistic(x, cdf)
    fitted = DistSpec(shape, scale)
    limit = 10 * B

    def replicate(b):
        stream = split(rng, b)
        failures = 0
        while failures < limit:
            resample = sample_gamma(split(stream, failures), fitted, n)
            try:
                return _fit_stats(resample), failures
            except (ConvergenceError, DomainError, DataError):
                failures += 1
        raise ConvergenceError(f"bootstrap replicate {b} failed {limit} refits")

    results = list(ordered_map(replicate, range(B), threads))
    failed = sum(f for _, f in results)
    if B + failed > limit:
        raise ConvergenceError(f"bootstrap needed {B + failed} attempts, more than {limit}")
    ks_reps = [r[0][0] for r in results]
    cvm_reps = [r[0][1] for r in results]
    return GofReport(
        n=n,
        shape_hat=shape,
        scale_hat=scale,
        ks_stat=ks_obs,
        cvm_stat=cvm_obs,
        ks_pvalue=empirical_pvalue(ks_obs, ks_reps),
        cvm_pvalue=empirical_pvalue(cvm_obs, cvm_reps),
        bootstrap_B=B,
        failed_refits=failed,
    )


def qq_points(sample, shape: float, scale: float) -> list[tuple[float, float]]:
    """(theoretical, empirical) quantile pairs at plotting positions (i - 0.5) / n."""
    x = np.sort(as_sample(sample).values)
    n = x.size
    probs = (np.arange(1, n + 1) - 0.5) / n
    theo = sps.gammaincinv(shape, probs) * scale
    return list(zip(theo.tolist(), x.tolist()))
