import math

import numpy as np
import pytest

from parineq.errors import DomainError
from parineq.rng import DistSpec, rng_new, sample, sample_gamma, split, stream_key


def test_same_seed_same_stream():
    a, b = rng_new(99), rng_new(99)
    assert np.array_equal(a.uniform(1000), b.uniform(1000))


def test_different_seeds_differ_early():
    assert not np.array_equal(rng_new(1).uniform(10), rng_new(2).uniform(10))


def test_split_children_distinct_and_reproducible():
    parent = rng_new(5)
    first = [split(parent, k).uniform(8) for k in range(10)]
    again = [split(rng_new(5), k).uniform(8) for k in range(10)]
    for x, y in zip(first, again):
        assert np.array_equal(x, y)
    keys = {tuple(x) for x in first}
    assert len(keys) == 10


def test_split_is_order_independent():
    p = rng_new(7)
    c3 = split(p, 3).uniform(5)
    c5 = split(p, 5).uniform(5)
    q = rng_new(7)
    d5 = split(q, 5).uniform(5)
    d3 = split(q, 3).uniform(5)
    assert np.array_equal(c3, d3) and np.array_equal(c5, d5)


def test_split_ignores_parent_draws():
    p = rng_new(7)
    before = split(p, 1).uniform(5)
    p.uniform(1000)
    assert np.array_equal(before, split(p, 1).uniform(5))


def test_split_zero_and_one_differ():
    p = rng_new(11)
    assert not np.array_equal(split(p, 0).uniform(5), split(p, 1).uniform(5))


def test_nested_split_differs_from_flat():
    p = rng_new(11)
    assert not np.array_equal(split(split(p, 1), 2).uniform(5), split(p, 2).uniform(5))


def test_stream_key_is_stable():
    assert stream_key("rep", "GP", 2.0, 50, 7) == 9890204984344785279
    assert stream_key("rep", "GP", 2.0, 50, 7) != stream_key("rep", "GP", 2.0, 50, 8)


@pytest.mark.parametrize("seed", [-1, 1 << 64])
def test_seed_range(seed):
    with pytest.raises(DomainError):
        rng_new(seed)


def test_gamma_moments_large_sample():
    x = sample_gamma(rng_new(2024), DistSpec(1.5, 1.0), 10**6)
    assert np.all(x > 0)
    assert abs(x.mean() - 1.5) < 0.01
    assert abs(x.var() / 1.5 - 1) < 0.02


def test_gamma_shape_below_one():
    x = sample_gamma(rng_new(3), DistSpec(0.4, 2.0), 400_000)
    assert np.all(x > 0)
    assert abs(x.mean() - 0.8) < 0.01
    assert abs(x.var() / (0.4 * 4.0) - 1) < 0.03


def test_fig1_sample_shape():
    x = sample_gamma(rng_new(1), DistSpec(1.5, 2.5), 50)
    assert x.shape == (50,) and np.all(x > 0)


def test_exponential_special_case_ks_distance():
    theta = 2.0
    x = np.sort(sample_gamma(rng_new(8), DistSpec(1.0, theta), 10**5))
    n = x.size
    cdf = 1.0 - np.exp(-x / theta)
    i = np.arange(1, n + 1)
    d = max(np.max(i / n - cdf), np.max(cdf - (i - 1) / n))
    assert d < 0.01


def test_gamma_reproducible():
    spec = DistSpec(1.5, 1.0)
    assert np.array_equal(sample_gamma(rng_new(4), spec, 777), sample_gamma(rng_new(4), spec, 777))


@pytest.mark.parametrize("shape,scale,family", [(0.0, 1.0, "gamma"), (1.0, -1.0, "gamma"), (1.0, 1.0, "beta")])
def test_invalid_dist(shape, scale, family):
    with pytest.raises(DomainError):
        DistSpec(shape, scale, family)


def test_invalid_count():
    with pytest.raises(DomainError):
        sample_gamma(rng_new(1), DistSpec(), 0)


def test_point_mass():
    spec = DistSpec(scale=3.0, family="point")
    assert spec.mean == 3.0
    assert np.all(sample(rng_new(1), spec, 5) == 3.0)


def test_dist_mean():
    assert math.isclose(DistSpec(1.5, 2.5).mean, 3.75)
