import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from parineq.errors import DomainError
from parineq.special import digamma, ln_gamma, log1p_exp, power_mean, reg_gamma_lower

mp.mp.dps = 40

finite_t = st.floats(min_value=-700, max_value=700, allow_nan=False)
positive = st.floats(min_value=1e-3, max_value=1e3, allow_nan=False)


class TestLog1pExp:
    def test_symmetry_point(self):
        assert log1p_exp(0.0) == pytest.approx(0.6931471805599453, rel=1e-15)

    def test_large_argument(self):
        assert log1p_exp(1000.0) == pytest.approx(1000.0, rel=1e-13)

    def test_negative_argument(self):
        # mpmath oracle: log1p(exp(-5))
        assert log1p_exp(-5.0) == pytest.approx(0.006715348489118068, rel=1e-14)

    @pytest.mark.parametrize("t", [-708.0, -300.0, -41.0, -40.0, -1e-8, 3.7, 39.9, 40.1, 200.0])
    def test_relative_error_against_mpmath(self, t):
        exact = mp.log1p(mp.exp(t))
        assert abs(log1p_exp(t) - exact) / exact < 1e-14

    def test_rejects_non_finite(self):
        with pytest.raises(DomainError):
            log1p_exp(float("inf"))

    @given(finite_t)
    def test_difference_identity(self, t):
        assert abs(log1p_exp(t) - log1p_exp(-t) - t) <= 1e-12 * max(1.0, abs(t))

    @given(finite_t, finite_t)
    def test_monotone(self, a, b):
        lo, hi = sorted((a, b))
        assert log1p_exp(lo) <= log1p_exp(hi)


class TestPowerMean:
    def test_arithmetic(self):
        assert power_mean([1, 3], 1) == 2.0

    def test_harmonic(self):
        assert power_mean([1, 3], -1) == pytest.approx(1.5, rel=1e-15)

    def test_zero_with_negative_order(self):
        assert power_mean([0, 5], -2) == 0.0

    def test_huge_order_does_not_overflow(self):
        assert power_mean([1e10, 2e10], 1e6) == pytest.approx(2e10, rel=1e-5)
        assert power_mean([1e-10, 2e-10], -1e6) == pytest.approx(1e-10, rel=1e-5)

    @pytest.mark.parametrize(
        "values,r", [([], 1.0), ([1.0, -1.0], 1.0), ([1.0, 2.0], 0.0), ([1.0, float("nan")], 2.0)]
    )
    def test_domain_errors(self, values, r):
        with pytest.raises(DomainError):
            power_mean(values, r)

    @given(
        st.lists(positive, min_size=1, max_size=6),
        st.floats(min_value=-50, max_value=50).filter(lambda r: abs(r) > 1e-3),
        st.floats(min_value=-50, max_value=50).filter(lambda r: abs(r) > 1e-3),
    )
    def test_monotone_in_order(self, values, r1, r2):
        lo, hi = sorted((r1, r2))
        assert power_mean(values, lo) <= power_mean(values, hi) * (1 + 1e-12)

    @given(
        st.lists(positive, min_size=1, max_size=6),
        st.floats(min_value=-20, max_value=20).filter(lambda r: abs(r) > 1e-3),
        st.floats(min_value=1e-3, max_value=1e3),
    )
    def test_homogeneous(self, values, r, c):
        scaled = power_mean([c * v for v in values], r)
        assert scaled == pytest.approx(c * power_mean(values, r), rel=1e-12)

    @given(st.lists(positive, min_size=1, max_size=6), st.floats(min_value=-30, max_value=30).filter(bool))
    def test_between_min_and_max(self, values, r):
        pm = power_mean(values, r)
        assert min(values) * (1 - 1e-12) <= pm <= max(values) * (1 + 1e-12)


class TestLnGamma:
    def test_one(self):
        assert ln_gamma(1.0) == pytest.approx(0.0, abs=1e-15)

    def test_two_and_a_half(self):
        assert ln_gamma(2.5) == pytest.approx(0.2846828704729192, abs=1e-14)

    def test_half(self):
        assert ln_gamma(0.5) == pytest.approx(math.log(math.sqrt(math.pi)), abs=1e-14)

    @pytest.mark.parametrize("x", np.geomspace(1e-8, 1e8, 61))
    def test_against_mpmath(self, x):
        exact = float(mp.loggamma(x))
        assert abs(ln_gamma(x) - exact) <= 1e-12 * max(1.0, abs(exact))

    @pytest.mark.parametrize("x", [0.0, -1.0, float("nan")])
    def test_domain(self, x):
        with pytest.raises(DomainError):
            ln_gamma(x)


class TestDigamma:
    EULER = 0.5772156649015329

    def test_one(self):
        assert digamma(1.0) == pytest.approx(-self.EULER, abs=1e-10)

    def test_two(self):
        assert digamma(2.0) == pytest.approx(1.0 - self.EULER, abs=1e-10)

    def test_matches_derivative_of_ln_gamma(self):
        h = 1e-5
        fd = (ln_gamma(10 + h) - ln_gamma(10 - h)) / (2 * h)
        assert digamma(10.0) == pytest.approx(fd, abs=1e-6)

    @pytest.mark.parametrize("x", np.geomspace(1e-4, 1e6, 41))
    def test_against_mpmath(self, x):
        assert abs(digamma(x) - float(mp.digamma(x))) <= 1e-10

    def test_domain(self):
        with pytest.raises(DomainError):
            digamma(-2.0)


class TestRegGammaLower:
    def test_exponential_case(self):
        assert reg_gamma_lower(1.0, 1.0) == pytest.approx(1 - math.exp(-1), abs=1e-15)

    @pytest.mark.parametrize("a", [0.3, 1.0, 7.5])
    def test_zero(self, a):
        assert reg_gamma_lower(a, 0.0) == 0.0

    def test_numerical_integration_value(self):
        assert reg_gamma_lower(1.5, 1.5) == pytest.approx(0.6083748237289110, abs=1e-10)

    @pytest.mark.parametrize("a", [0.05, 0.5, 1.5, 4.0, 30.0, 300.0])
    @pytest.mark.parametrize("frac", [0.01, 0.3, 0.9, 1.0, 1.1, 2.0, 5.0])
    def test_against_mpmath(self, a, frac):
        x = a * frac
        exact = float(mp.gammainc(a, 0, x, regularized=True))
        assert abs(reg_gamma_lower(a, x) - exact) <= 1e-10

    @pytest.mark.parametrize("a", [0.2, 1.5, 10.0, 80.0])
    def test_monotone_with_limits(self, a):
        xs = np.linspace(0, 50 * a, 400)
        vals = [reg_gamma_lower(a, x) for x in xs]
        assert vals[0] == 0.0
        assert all(b >= a_ - 1e-15 for a_, b in zip(vals, vals[1:]))
        # P(0.2, 10) is 1 - 1.5e-6, so the far end is only compared loosely to 1
        assert 1.0 - vals[-1] < 1e-5
        assert vals[-1] == pytest.approx(float(mp.gammainc(a, 0, 50 * a, regularized=True)), abs=1e-10)

    def test_matches_vectorized_route(self):
        from scipy.special import gammainc

        for a, x in [(0.7, 0.2), (1.5, 3.1), (12.0, 9.0), (4.58, 2.2)]:
            assert reg_gamma_lower(a, x) == pytest.approx(float(gammainc(a, x)), abs=1e-12)

    @pytest.mark.parametrize("a,x", [(0.0, 1.0), (1.0, -0.1), (-2.0, 1.0)])
    def test_domain(self, a, x):
        with pytest.raises(DomainError):
            reg_gamma_lower(a, x)
