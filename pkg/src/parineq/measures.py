"""Index estimators, Monte Carlo population values and delta-method intervals."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from statistics import NormalDist
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DataError, DomainError
from .kernels import check_p, check_q, pair_row_kernel, row_kernel
from .rng import DistSpec, RngState, sample as draw
from .ustat import (
    DEFAULT_MAX_KERNEL_EVALS,
    Exact,
    Incomplete,
    Sample,
    as_sample,
    u_statistic,
    xi_components,
)


@dataclass(frozen=True)
class IndexSpec:
    """Which index to compute.

    ``family`` is ``"GP"`` (log kernel, needs ``p > 1``), ``"HQ"`` (power-mean
    gap, needs ``q > 0``) or ``"LIMIT"`` (range kernel: the Gini coefficient
    for m = 2, the m-th Gini index otherwise).
    """

    family: str
    m: int = 2
    p: float | None = None
    q: float | None = None

    def __post_init__(self):
        if self.family not in ("GP", "HQ", "LIMIT"):
            raise DomainError(f"unknown index family {self.family!r}")
        if int(self.m) != self.m or self.m < 2:
            raise DomainError(f"order m must be an integer >= 2, got {self.m!r}")
        if self.family == "GP":
            if self.q is not None:
                raise DomainError("GP takes p, not q")
            object.__setattr__(self, "p", check_p(self.p if self.p is not None else float("nan")))
        elif self.family == "HQ":
            if self.p is not None:
                raise DomainError("HQ takes q, not p")
            object.__setattr__(self, "q", check_q(self.q if self.q is not None else float("nan")))
        elif self.p is not None or self.q is not None:
            raise DomainError("LIMIT takes no parameter")

    @classmethod
    def make(cls, family: str, param: float | None = None, m: int = 2) -> "IndexSpec":
        if family == "GP":
            return cls("GP", m=m, p=param)
        if family == "HQ":
            return cls("HQ", m=m, q=param)
        return cls(family, m=m)

    @property
    def param(self) -> float | None:
        return self.p if self.family == "GP" else self.q

    def kernel(self):
        return row_kernel(self.family, self.param)

    def pair_kernel(self):
        if self.m != 2:
            raise DomainError("pair kernel requested for an order-m spec with m != 2")
        return pair_row_kernel(self.family, self.param)


@dataclass(frozen=True)
class Estimate:
    spec: IndexSpec
    point: float
    n: int
    se: float | None = None
    ci_low: float | None = None
    ci_high: float | None = None
    level: float | None = None
    diagnostics: tuple[str, ...] = field(default_factory=tuple)

    def to_record(self) -> dict:
        ci = None if self.ci_low is None else [self.ci_low, self.ci_high]
        return {
            "family": self.spec.family,
            "m": self.spec.m,
            "param": self.spec.param,
            "point": self.point,
            "se": self.se,
            "ci": ci,
            "level": self.level,
            "n": self.n,
            "diagnostics": list(self.diagnostics),
        }


def estimate_index(
    sample,
    spec: IndexSpec,
    mode=None,
    *,
    threads: int = 1,
    max_kernel_evals: int = DEFAULT_MAX_KERNEL_EVALS,
) -> Estimate:
    """Point estimate ``U_n / (m * mean)``.

    This equals the factorial-prefactor form (m-1)!/((n-1)...(n-m+1)) * sum / sum(X)
    because C(n, m)^-1 / (m * mean) = (m-1)! / ((n-1)...(n-m+1)) / sum(X).
    """
    sample = as_sample(sample)
    if spec.m > sample.n:
        raise DomainError(f"order m={spec.m} exceeds sample size n={sample.n}")
    u = u_statistic(
        sample, spec.kernel(), spec.m, mode, threads=threads, max_kernel_evals=max_kernel_evals
    )
    diagnostics = ("incomplete",) if isinstance(mode, Incomplete) else ()
    return Estimate(spec=spec, point=u / (spec.m * sample.mean), n=sample.n, diagnostics=diagnostics)


def pair_estimate(sample, family: str, param: float | None = None) -> float:
    """Pairwise estimator written the textbook way, for m = 2 only:

    ``sum_{i<j} k(X_i, X_j) / ((n - 1) * sum(X))``.

    Kept separate from `estimate_index` so the two can check each other.
    """
    sample = as_sample(sample)
    kernel = pair_row_kernel(family, param)
    x = sample.values
    n = sample.n
    partial = []
    for i in range(n - 1):
        rest = x[i + 1 :]
        rows = np.column_stack([np.full(rest.size, x[i]), rest])
        partial.append(float(np.sum(kernel(rows))))
    return math.fsum(partial) / ((n - 1) * sample.total)


def sorted_gini(sample) -> float:
    """Pairwise-difference Gini via order statistics in O(n log n)."""
    sample = as_sample(sample)
    x = np.sort(sample.values)
    n = sample.n
    weights = 2.0 * np.arange(1, n + 1) - n - 1
    return math.fsum(weights * x) / ((n - 1) * sample.total)


def normal_quantile(prob: float) -> float:
    return NormalDist().inv_cdf(prob)


def estimate_with_ci(
    sample,
    spec: IndexSpec,
    level: float = 0.95,
    *,
    threads: int = 1,
    max_kernel_evals: int = DEFAULT_MAX_KERNEL_EVALS,
) -> Estimate:
    """Point estimate with a delta-method normal interval (m = 2 only).

    The asymptotic variance of sqrt(n) * (U_n / (2 * mean)) is evaluated at
    the plug-ins x = U_n, y = mean::

        xi1 / y**2 - x * xi12 / y**3 + x**2 * xi2 / (4 * y**4)

    The interval is ``point +/- z * se`` truncated below at 0.
    """
    sample = as_sample(sample)
    if spec.m != 2:
        raise DomainError("confidence intervals are only available for m = 2")
    if not 0.0 < level < 1.0:
        raise DomainError(f"level must be in (0, 1), got {level!r}")
    if sample.n < 3:
        raise DataError(f"confidence intervals need n >= 3, got {sample.n}")
    xi = xi_components(
        sample, spec.pair_kernel(), threads=threads, max_kernel_evals=max_kernel_evals
    )
    x, y = xi.u_value, xi.mean
    var = xi.xi1 / y**2 - x * xi.xi12 / y**3 + x * x * xi.xi2 / (4.0 * y**4)
    diagnostics = []
    if xi.clamped or var <= 0.0:
        diagnostics.append("variance_clamped")
        var = max(var, 0.0)
    if not xi.psd:
        diagnostics.append("xi_not_psd")
    point = x / (2.0 * y)
    se = math.sqrt(var / sample.n)
    z = normal_quantile(0.5 + level / 2.0)
    return Estimate(
        spec=spec,
        point=point,
        n=sample.n,
        se=se,
        ci_low=max(0.0, point - z * se),
        ci_high=point + z * se,
        level=level,
        diagnostics=tuple(diagnostics),
    )


def population_value(
    dist: DistSpec,
    spec: IndexSpec,
    draws: int,
    rng: RngState,
    *,
    batch_tuples: int = 1 << 17,
) -> float:
    """Monte Carlo approximation of the population index.

    ``draws // m`` independent m-tuples are drawn; the kernel average is
    divided by ``m`` times the known distribution mean.
    """
    draws = int(draws)
    if draws < 2 * spec.m:
        raise DomainError(f"need at least 2*m = {2 * spec.m} draws, got {draws}")
    kernel = spec.kernel()
    m = spec.m
    n_tuples = draws // m
    sums = []
    done = 0
    while done < n_tuples:
        k = min(batch_tuples, n_tuples - done)
        rows = draw(rng, dist, k * m).reshape(k, m)
        sums.append(float(np.sum(kernel(rows))))
        done += k
    return math.fsum(sums) / n_tuples / (m * dist.mean)


class ConvergenceCurve(NamedTuple):
    family: str
    points: list[tuple[float, float]]
    gini: float


def convergence_curve(
    sample,
    family: str,
    param_grid: Sequence[float],
    *,
    threads: int = 1,
    max_kernel_evals: int = DEFAULT_MAX_KERNEL_EVALS,
) -> ConvergenceCurve:
    """Pair estimator at each grid value, with the Gini estimate as reference."""
    if family not in ("GP", "HQ"):
        raise DomainError(f"curves are defined for GP or HQ, got {family!r}")
    sample = as_sample(sample)
    specs = [IndexSpec.make(family, v) for v in param_grid]
    opts = dict(threads=threads, max_kernel_evals=max_kernel_evals)
    points = [(s.param, estimate_index(sample, s, **opts).point) for s in specs]
    gini = estimate_index(sample, IndexSpec("LIMIT"), **opts).point
    return ConvergenceCurve(family, points, gini)


__all__ = [
    "ConvergenceCurve",
    "Estimate",
    "Exact",
    "Incomplete",
    "IndexSpec",
    "Sample",
    "convergence_curve",
    "estimate_index",
    "estimate_with_ci",
    "pair_estimate",
    "population_value",
    "sorted_gini",
]
