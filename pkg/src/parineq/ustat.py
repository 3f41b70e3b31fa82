"""U-statistic engine and plug-in variance components.

Combinations are visited in lexicographic order of original data positions,
cut into chunks whose boundaries depend only on ``(n, m, chunk_size)``. Each
chunk is summed on its own and the chunk sums are combined with
``math.fsum``, so the result does not depend on how many threads ran.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator

import numpy as np

from .errors import BudgetExceededError, DataError, DomainError
from .parallel import ordered_map
from .rng import RngState

DEFAULT_MAX_KERNEL_EVALS = 10**8
DEFAULT_CHUNK_SIZE = 1 << 16

Kernel = Callable[[np.ndarray], np.ndarray]


class Sample:
    """Validated nonnegative observations with cached total and mean.

    The stored array is read-only.
    """

    __slots__ = ("values", "n", "total", "mean")

    def __init__(self, values):
        arr = np.array(values, dtype=np.float64).ravel()
        if arr.size < 2:
            raise DataError(f"a sample needs at least 2 observations, got {arr.size}")
        if not np.all(np.isfinite(arr)):
            raise DataError("sample values must be finite")
        if np.any(arr < 0):
            raise DataError("sample values must be nonnegative")
        total = math.fsum(arr)
        if not total > 0:
            raise DataError("sample total must be positive")
        arr.setflags(write=False)
        self.values = arr
        self.n = int(arr.size)
        self.total = total
        self.mean = total / self.n

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"Sample(n={self.n}, mean={self.mean!r})"

    def scaled(self, factor: float) -> "Sample":
        return Sample(self.values * float(factor))


def as_sample(data) -> Sample:
    return data if isinstance(data, Sample) else Sample(data)


@dataclass(frozen=True)
class Exact:
    """Enumerate every size-m combination."""


@dataclass(frozen=True)
class Incomplete:
    """Average over ``n_combos`` distinct combinations drawn uniformly from ``rng``."""

    n_combos: int
    rng: RngState


@dataclass(frozen=True)
class XiEstimates:
    """Plug-in variance components for a pair kernel.

    ``xi1`` is the variance of the conditional kernel means, ``xi12`` their
    covariance with the observations, ``xi2`` the variance of the
    observations (all with divisor n). ``u_value`` is the U-statistic itself.
    """

    xi1: float
    xi12: float
    xi2: float
    u_value: float
    mean: float
    n: int
    clamped: bool = False
    psd: bool = True


# -- chunking ----------------------------------------------------------------


def _pair_blocks(n: int, chunk_size: int) -> Iterator[tuple[int, int]]:
    """Row ranges [a, b) whose upper-triangle pair counts fill ~chunk_size."""
    a = 0
    while a < n - 1:
        b = a
        count = 0
        while b < n - 1 and (count == 0 or count + (n - 1 - b) <= chunk_size):
            count += n - 1 - b
            b += 1
        yield a, b
        a = b


def _pair_indices(n: int, a: int, b: int) -> np.ndarray:
    rows = np.arange(a, b)
    counts = n - 1 - rows
    i = np.repeat(rows, counts)
    starts = np.cumsum(counts) - counts
    pos = np.arange(counts.sum()) - np.repeat(starts, counts)
    return np.column_stack([i, i + 1 + pos])


def combination_chunks(n: int, m: int, chunk_size: int = DEFAULT_CHUNK_SIZE) -> Iterator[np.ndarray]:
    """Lexicographic index combinations of ``range(n)`` as ``(k, m)`` arrays."""
    if m == 2:
        for a, b in _pair_blocks(n, chunk_size):
            yield _pair_indices(n, a, b)
        return
    it = itertools.combinations(range(n), m)
    while True:
        block = list(itertools.islice(it, chunk_size))
        if not block:
            return
        yield np.array(block, dtype=np.intp)


def _kernel_sum(values: np.ndarray, kernel: Kernel, index_chunks: Iterable[np.ndarray], threads: int) -> float:
    def chunk_sum(idx):
        return float(np.sum(kernel(values[idx])))

    return math.fsum(ordered_map(chunk_sum, index_chunks, threads))


# -- public operations -------------------------------------------------------


def u_statistic(
    sample,
    kernel: Kernel,
    m: int,
    mode=None,
    *,
    max_kernel_evals: int = DEFAULT_MAX_KERNEL_EVALS,
    threads: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> float:
    """Order-m U-statistic of ``kernel`` over ``sample``.

    Parameters
    ----------
    sample : Sample or array_like
    kernel : callable
        Maps a ``(k, m)`` array of observation tuples to ``k`` kernel values.
        Column order follows the combination's index order, which matters only for
        asymmetric kernels.
    m : int
        Kernel order, ``2 <= m <= n``.
    mode : Exact or Incomplete, optional
        Defaults to exact enumeration.
    max_kernel_evals : int
        Exact mode refuses to run when C(n, m) exceeds this.

    Returns
    -------
    float
    """
    sample = as_sample(sample)
    n = sample.n
    m = int(m)
    if m < 2:
        raise DomainError(f"kernel order must be >= 2, got {m}")
    if m > n:
        raise DomainError(f"kernel order m={m} exceeds sample size n={n}")
    mode = Exact() if mode is None else mode
    total_combos = math.comb(n, m)
    values = sample.values

    if isinstance(mode, Incomplete):
        n_combos = int(mode.n_combos)
        if n_combos < 1:
            raise DomainError("incomplete U-statistic needs at least one combination")
        if n_combos < total_combos:
            combos = _draw_combinations(n, m, n_combos, mode.rng)
            chunks = (combos[s : s + chunk_size] for s in range(0, n_combos, chunk_size))
            return _kernel_sum(values, kernel, chunks, threads) / n_combos
        # asking for every combination is just the exact statistic
    elif not isinstance(mode, Exact):
        raise DomainError(f"unknown U-statistic mode {mode!r}")

    if total_combos > max_kernel_evals:
        raise BudgetExceededError(
            f"C({n},{m}) = {total_combos} kernel evaluations exceeds the budget of {max_kernel_evals}; "
            "raise the budget or use an incomplete U-statistic"
        )
    chunks = combination_chunks(n, m, chunk_size)
    return _kernel_sum(values, kernel, chunks, threads) / total_combos


def _draw_combinations(n: int, m: int, count: int, rng: RngState) -> np.ndarray:
    """``count`` distinct sorted index combinations, uniform over all C(n, m)."""
    gen = rng.generator
    seen: set[tuple[int, ...]] = set()
    out: list[tuple[int, ...]] = []
    while len(out) < count:
        need = count - len(out)
        batch_size = min(need + need // 8 + 8, 1 << 16)
        if m * m <= n:
            batch = gen.integers(0, n, size=(batch_size, m))
            batch.sort(axis=1)
            batch = batch[np.all(np.diff(batch, axis=1) > 0, axis=1)]
        else:
            # prefixes of random permutations; rejection would stall here
            keys = gen.random((batch_size, n))
            batch = np.sort(np.argpartition(keys, m - 1, axis=1)[:, :m], axis=1)
        for row in map(tuple, batch.tolist()):
            if row not in seen:
                seen.add(row)
                out.append(row)
                if len(out) == count:
                    break
    return np.array(out, dtype=np.intp)


def conditional_means(
    sample,
    pair_kernel: Kernel,
    *,
    threads: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> np.ndarray:
    """For each i, the average of ``pair_kernel(X_i, X_j)`` over j != i."""
    sample = as_sample(sample)
    x = sample.values
    n = sample.n
    rows_per_block = max(1, chunk_size // n)

    def block_sums(a):
        b = min(n, a + rows_per_block)
        left = np.repeat(x[a:b], n)
        right = np.tile(x, b - a)
        vals = pair_kernel(np.column_stack([left, right])).reshape(b - a, n)
        vals[np.arange(b - a), np.arange(a, b)] = 0.0
        return vals.sum(axis=1)

    parts = list(ordered_map(block_sums, range(0, n, rows_per_block), threads))
    return np.concatenate(parts) / (n - 1)


def xi_components(
    sample,
    pair_kernel: Kernel,
    *,
    threads: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    max_kernel_evals: int = DEFAULT_MAX_KERNEL_EVALS,
) -> XiEstimates:
    """Plug-in estimates of the variance components of (U_n, mean).

    O(n^2) kernel evaluations. Small negative variances from rounding are
    clamped to 0 and flagged.
    """
    sample = as_sample(sample)
    n = sample.n
    if n < 3:
        raise DataError(f"variance components need n >= 3, got {n}")
    if n * n > max_kernel_evals:
        raise BudgetExceededError(
            f"{n * n} kernel evaluations exceeds the budget of {max_kernel_evals}"
        )
    x = sample.values
    g1 = conditional_means(sample, pair_kernel, threads=threads, chunk_size=chunk_size)
    u = math.fsum(g1) / n
    mean = sample.mean
    dg = g1 - u
    dx = x - mean
    xi1 = float(np.mean(dg * dg))
    xi12 = float(np.mean(dx * dg))
    xi2 = float(np.mean(dx * dx))
    clamped = False
    if xi1 < 0:
        xi1, clamped = 0.0, True
    if xi2 < 0:
        xi2, clamped = 0.0, True
    psd = xi12 * xi12 <= xi1 * xi2 * (1 + 1e-12) + 1e-300
    return XiEstimates(xi1=xi1, xi12=xi12, xi2=xi2, u_value=u, mean=mean, n=n, clamped=clamped, psd=psd)
