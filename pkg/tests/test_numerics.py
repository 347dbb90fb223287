import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from laserentropy.numerics import (
    SeriesResult,
    hypergeometric_1f1_1,
    log_factorial,
    log_factorial_real,
    log_gamma,
    log_hypergeometric_asymptotic,
    stirling_log_factorial,
)

mpmath.mp.dps = 40


def mp_log_1f1(b, a):
    return float(mpmath.log(mpmath.hyp1f1(1, b, a)))


class TestLogFactorial:
    @pytest.mark.parametrize("n, expected", [(0, 0.0), (1, 0.0)])
    def test_trivial(self, n, expected):
        assert log_factorial(n) == expected

    def test_ten(self):
        # ln(3628800), computed with mpmath at 40 digits
        assert log_factorial(10) == pytest.approx(15.104412573075515, rel=1e-15)

    @pytest.mark.parametrize("n", [19, 20, 21, 22, 100, 1000])
    def test_against_mpmath(self, n):
        assert log_factorial(n) == pytest.approx(float(mpmath.log(mpmath.factorial(n))), rel=1e-14)

    def test_recurrence(self):
        prev = log_factorial(0)
        for n in range(1, 10_001):
            cur = log_factorial(n)
            assert cur == pytest.approx(math.log(n) + prev, rel=1e-12, abs=1e-12)
            assert cur >= prev
            prev = cur

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            log_factorial(-1)

    def test_real_argument_matches_integer(self):
        assert log_factorial_real(7.0) == log_factorial(7)
        assert log_factorial_real(37.5) == pytest.approx(float(mpmath.loggamma(38.5)), rel=1e-14)

    def test_log_gamma(self):
        assert log_gamma(0.5) == pytest.approx(0.5 * math.log(math.pi), rel=1e-14)
        with pytest.raises(ValueError):
            log_gamma(0.0)


class TestStirling:
    def test_one(self):
        assert stirling_log_factorial(1) == pytest.approx(-0.08106146679532726, rel=1e-14)

    def test_ten_close_to_exact(self):
        assert abs(stirling_log_factorial(10) - log_factorial(10)) < 0.01

    def test_hundred_relative(self):
        exact = log_factorial(100)
        assert abs(stirling_log_factorial(100) - exact) / exact < 1e-4

    @pytest.mark.parametrize("n", [0, -3.0])
    def test_rejects_nonpositive(self, n):
        with pytest.raises(ValueError):
            stirling_log_factorial(n)

    def test_error_is_one_over_12n(self):
        # next Stirling term; the remainder shrinks like 1/(360 n^3)
        for n in (10, 100, 1000):
            gap = log_factorial(n) - stirling_log_factorial(n)
            assert gap == pytest.approx(1.0 / (12 * n), rel=1 / (30 * n**2) + 1e-9)


class TestHypergeometric:
    def test_empty_sum(self):
        r = hypergeometric_1f1_1(5, 0)
        assert r.converged and r.terms_used == 1
        assert r.linear() == 1.0

    def test_b_one_is_exponential(self):
        r = hypergeometric_1f1_1(1, 2)
        assert r.converged
        assert r.linear() == pytest.approx(math.exp(2), rel=1e-12)

    @pytest.mark.parametrize("a", [0.0, 0.3, 1.0, 7.5, 20.0, 49.0, 50.0])
    def test_b_one_over_range(self, a):
        assert hypergeometric_1f1_1(1, a).linear() == pytest.approx(math.exp(a), rel=1e-10)

    @pytest.mark.parametrize(
        "b, a", [(101, 100), (2.5, 40.0), (51, 100.0), (38.5, 1e3), (11, 1e4), (1001, 10.0)]
    )
    def test_against_mpmath(self, b, a):
        r = hypergeometric_1f1_1(b, a)
        assert r.converged
        assert r.value == pytest.approx(mp_log_1f1(b, a), rel=1e-12)

    def test_asymptotic_a400_b200(self):
        B, A = 200.0, 400.0
        exact = hypergeometric_1f1_1(B + 1, A).value
        asym = log_hypergeometric_asymptotic(B, A)
        assert abs(math.expm1(asym - exact)) < 1e-3

    def test_term_cap_reports_nonconvergence(self):
        r = hypergeometric_1f1_1(1.0, 1e4, max_terms=100)
        assert isinstance(r, SeriesResult)
        assert not r.converged
        assert r.terms_used == 100

    @pytest.mark.parametrize("b, a", [(0, 1), (-1, 1), (1, -0.5)])
    def test_bad_arguments(self, b, a):
        with pytest.raises(ValueError):
            hypergeometric_1f1_1(b, a)

    @pytest.mark.parametrize("a", [5e-324, 1e-310, 1e-300])
    def test_subnormal_argument(self, a):
        r = hypergeometric_1f1_1(1.0, a)
        assert r.converged and r.value == pytest.approx(a, abs=1e-300)

    def test_linear_overflow_is_inf(self):
        r = hypergeometric_1f1_1(1, 1e4)
        assert r.linear() == math.inf
        assert r.value == pytest.approx(1e4, rel=1e-12)

    @settings(max_examples=60, deadline=None)
    @given(b=st.floats(0.05, 500), a=st.floats(0, 2000))
    def test_at_least_one(self, b, a):
        assert hypergeometric_1f1_1(b, a).value >= 0.0

    def test_asymptotic_improves_with_a(self):
        B = 50.0
        errs = []
        for A in (55.0, 60.0, 70.0, 80.0, 100.0):
            exact = hypergeometric_1f1_1(B + 1, A).value
            errs.append(abs(math.expm1(log_hypergeometric_asymptotic(B, A) - exact)))
        assert all(e2 < e1 for e1, e2 in zip(errs, errs[1:]))
