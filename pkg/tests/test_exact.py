import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from randchain.exact import (
    BivariateSeries,
    RationalPoly,
    binomial,
    esp_c,
    esp_row,
    fmt_rational,
    harmonic,
    harmonic_float,
    parse_rational,
    rising_factorial,
)

small = st.integers(min_value=0, max_value=60)
fractions = st.fractions(min_value=-100, max_value=100, max_denominator=50)


@given(small, small)
def test_pascal_rule(n, k):
    assert binomial(n + 1, k + 1) == binomial(n, k) + binomial(n, k + 1)


def test_binomial_edges():
    assert binomial(5, -1) == 0
    assert binomial(5, 6) == 0
    assert binomial(0, 0) == 1
    with pytest.raises(ValueError):
        binomial(-1, 0)


@given(fractions, st.integers(0, 12), st.integers(0, 12))
def test_rising_factorial_splits(a, m, n):
    assert rising_factorial(a, m + n) == rising_factorial(a, m) * rising_factorial(a + m, n)


def test_rising_factorial_values():
    assert rising_factorial(1, 5) == 120
    assert rising_factorial(Fraction(1, 2), 0) == 1
    with pytest.raises(ValueError):
        rising_factorial(1, -1)


@pytest.mark.parametrize("order", [1, 2, 3])
def test_harmonic_differences(order):
    for n in range(1, 201):
        assert harmonic(n, order) - harmonic(n - 1, order) == Fraction(1, n**order)


def test_harmonic_values():
    assert harmonic(0) == 0
    assert harmonic(4) == Fraction(25, 12)
    assert harmonic(4, 2) == Fraction(205, 144)
    assert math.isclose(harmonic_float(100), float(harmonic(100)), rel_tol=1e-15)
    with pytest.raises(ValueError):
        harmonic(3, 0)


def test_esp_generating_product():
    # sum_k c(k, l) t^k == prod_{j<=l} (1 + a_j t)
    prod = RationalPoly([1])
    for ell in range(21):
        if ell:
            prod = prod * RationalPoly([1, Fraction(2, ell * (ell + 1))])
        assert RationalPoly(esp_row(ell)) == prod


def test_esp_examples():
    assert esp_c(0, 0) == 1
    assert esp_c(1, 1) == 1
    assert esp_c(2, 3) == Fraction(5, 9)
    assert esp_c(4, 3) == 0


@given(st.fractions())
def test_rational_round_trip(x):
    s = fmt_rational(x)
    assert "/" in s
    assert parse_rational(s) == x
    p, q = map(int, s.split("/"))
    assert q > 0 and math.gcd(p, q) == 1


def test_fmt_integer_has_denominator():
    assert fmt_rational(3) == "3/1"
    assert fmt_rational(Fraction(-4, 6)) == "-2/3"


class TestRationalPoly:
    def test_trailing_zeros_stripped(self):
        p = RationalPoly([1, 2, 0, 0])
        assert p.degree == 1
        assert RationalPoly().degree == -1
        assert RationalPoly([0, 0]) == 0

    @given(st.lists(fractions, max_size=6), st.lists(fractions, max_size=6), fractions)
    @settings(max_examples=50)
    def test_ring_homomorphism(self, a, b, t):
        p, q = RationalPoly(a), RationalPoly(b)
        assert (p * q).evaluate(t) == p.evaluate(t) * q.evaluate(t)
        assert (p + q).evaluate(t) == p.evaluate(t) + q.evaluate(t)
        assert (p - q).evaluate(t) == p.evaluate(t) - q.evaluate(t)

    def test_derivative(self):
        p = RationalPoly([5, 3, Fraction(1, 2)])
        assert p.derivative() == RationalPoly([3, 1])
        assert RationalPoly([7]).derivative() == 0

    def test_float_evaluation(self):
        assert isinstance(RationalPoly([1, 1]).evaluate(0.5), float)
        assert RationalPoly([1, 1])(Fraction(1, 2)) == Fraction(3, 2)


class TestBivariateSeries:
    def test_inverse_times_power_is_one(self):
        for p in (1, 2, 3):
            a = BivariateSeries.inverse_power_one_minus_sum(8, p)
            b = BivariateSeries.one_minus_sum_power(8, p)
            assert a * b == BivariateSeries(8, {(0, 0): 1})

    def test_inverse_square_coefficients(self):
        s = BivariateSeries.inverse_power_one_minus_sum(6, 2)
        # (1 - x - y)^-2 = sum_m (m+1) (x+y)^m
        for i in range(7):
            for j in range(7 - i):
                assert s[i, j] == (i + j + 1) * binomial(i + j, i)

    def test_truncation_drops_high_terms(self):
        s = BivariateSeries(2, {(0, 0): 1, (2, 1): 5, (1, 1): 0})
        assert s.coeffs == {(0, 0): 1}

    def test_shift_and_truncate(self):
        s = BivariateSeries(3, {(1, 1): 2})
        t = s.shift(1, 0)
        assert t.order == 4 and t[2, 1] == 2
        assert t.truncate(2).is_zero()
        with pytest.raises(ValueError):
            s.truncate(5)

    def test_derivatives(self):
        s = BivariateSeries(4, {(2, 1): 3, (0, 3): 1})
        assert s.dx() == BivariateSeries(3, {(1, 1): 6})
        assert s.dy() == BivariateSeries(3, {(2, 0): 3, (0, 2): 3})
        with pytest.raises(ValueError):
            BivariateSeries(0, {(0, 0): 1}).dx()

    def test_mismatched_orders(self):
        with pytest.raises(ValueError):
            BivariateSeries(2) + BivariateSeries(3)

    def test_boundary_restrictions(self):
        s = BivariateSeries(2, {(0, 0): 1, (0, 2): 4, (1, 0): 7})
        assert s.at_x0() == [1, 0, 4]
        assert s.at_y0() == [1, 7, 0]
