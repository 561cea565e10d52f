import math
from fractions import Fraction
from itertools import combinations

import pytest

from randchain.exact import harmonic
from randchain.moments import (
    Route,
    area_vertex_identity_check,
    ev_vertex_product,
    ev_small_n_closed,
    evn_closed_12,
    expected_area,
    expected_volume_float,
    missed_volume_closed,
    missed_volume_moments,
    moment_closed,
    moment_recurrence,
    moment_table,
    q_from_p,
    q_recurrence_check,
    q_recurrence_residuals,
    second_area_moment,
    volume_variance,
)


def test_known_values():
    assert moment_closed(1, 1) == Fraction(1, 3)
    assert moment_closed(2, 1) == Fraction(13, 27)
    assert moment_closed(1, 2) == Fraction(1, 6)
    assert moment_closed(2, 2) == Fraction(101, 360)
    assert q_from_p(2, 1) == Fraction(13, 9)
    assert q_from_p(1, 3) == Fraction(2, 5)


def test_conventions_row_zero():
    for route in Route:
        t = moment_table(3, 3, route)
        assert t[(0, 0)] == 1
        assert all(t[(0, k)] == 0 for k in range(1, 4))
        assert all(t[(n, 0)] == 1 for n in range(4))


def test_routes_agree():
    tables = [moment_table(8, 8, r) for r in Route]
    for cell in tables[0].cells():
        assert tables[0][cell] == tables[1][cell] == tables[2][cell]


def test_route_provenance():
    assert set(moment_table(2, 2, "closed").route.values()) == {Route.CLOSED}


def test_moments_are_monotone_and_bounded():
    t = moment_recurrence(12, 6)
    for n in range(1, 13):
        for k in range(1, 7):
            assert 0 < t[(n, k)] < 1
            assert t[(n, k)] < t[(n, k - 1)]
            if n > 1:
                assert t[(n, k)] > t[(n - 1, k)]


def test_small_n_closed():
    for k in range(10):
        assert ev_small_n_closed(1, k) == moment_closed(1, k)
        assert ev_small_n_closed(2, k) == moment_closed(2, k)
    with pytest.raises(ValueError):
        ev_small_n_closed(3, 1)


def test_vertex_product():
    for n in range(1, 9):
        for k in range(5):
            assert ev_vertex_product(n, k) == moment_closed(n, k)


def test_harmonic_closed_forms():
    for n in range(0, 20):
        if n:
            assert evn_closed_12(n, 1) == moment_closed(n, 1)
            assert evn_closed_12(n, 2) == moment_closed(n, 2)
        assert expected_area(n) == evn_closed_12(n, 1) / 2
        assert second_area_moment(n) == evn_closed_12(n, 2) / 4


def test_variance():
    assert volume_variance(1) == Fraction(1, 72)
    for n in range(1, 30):
        ev1, ev2 = moment_closed(n, 1), moment_closed(n, 2)
        assert volume_variance(n) == (ev2 - ev1**2) / 4


def test_missed_volume():
    assert missed_volume_closed(1, 2) == Fraction(1, 2)
    assert missed_volume_closed(0, 2) == 1
    assert missed_volume_closed(2, 2) == Fraction(343, 1080)
    for n in range(1, 20):
        for k in (1, 2):
            assert missed_volume_closed(n, k) == missed_volume_moments(n, k)


def test_missed_volume_alternative_constant_disagrees():
    # a (16n + 36) constant in place of (52n + 144) does not match the expansion
    n = 3
    h, h2 = harmonic(n + 2), harmonic(n + 2, 2)
    d = (n + 1) * (n + 2)
    variant = 40 * h / (27 * d) - Fraction(16 * n + 36, 27 * d * (n + 3)) + 4 * (h * h + h2) / (9 * d)
    assert variant != missed_volume_moments(n, 2)


def test_area_vertex_identity():
    assert all(area_vertex_identity_check(n) for n in range(1, 30))


def test_q_recurrence():
    assert q_recurrence_check(8, 8)
    t = moment_recurrence(6, 5)
    assert all(r == 0 for r in q_recurrence_residuals(t, 5, 5).values())
    with pytest.raises(ValueError):
        q_recurrence_residuals(t, 6, 5)


def test_q_recurrence_detects_corruption():
    t = moment_recurrence(6, 5)
    t.q[(3, 3)] += Fraction(1, 1000)
    assert not q_recurrence_check(5, 5, table=t)


def test_float_forms():
    assert expected_volume_float(50) == pytest.approx(float(moment_closed(50, 1)), rel=1e-13)
    assert expected_volume_float(50, 2) == pytest.approx(float(moment_closed(50, 2)), rel=1e-13)


def test_higher_moment_asymptotic_band():
    # n (1 - E V_n^k) - (2k/3) log n should stay bounded for fixed k;
    # a sanity band only, no asymptotic statement is asserted
    t = moment_recurrence(200, 4)
    for k in range(1, 5):
        rem = [n * (1 - float(t[(n, k)])) - 2 * k / 3 * math.log(n) for n in (50, 100, 200)]
        assert all(0 < r < 3 for r in rem), (k, rem)
        assert abs(rem[2] - rem[1]) <= abs(rem[1] - rem[0]) + 1e-12, (k, rem)


def test_raw_scale_general_formula():
    # E vol(T_n)^k written with unscaled products 1/(j(j+1)) and a 2^(m-k) factor
    def raw(n, k):
        total = Fraction(0)
        for m in range(1, n + 1):
            for ell in range(m, n + k + 1):
                s = sum(
                    (Fraction(1, math.prod(j * (j + 1) for j in c)) for c in combinations(range(1, ell + 1), m)),
                    Fraction(0),
                )
                w = Fraction(math.comb(n + k - m, k) * math.comb(n + k, ell), math.comb(n + k, k))
                total += (-1) ** (ell + m) * Fraction(2) ** (m - k) * w * s
        return total

    for n in range(1, 5):
        for k in range(5):
            assert raw(n, k) == moment_closed(n, k) / 2**k


def test_raw_scale_single_point():
    # E vol(T_1)^k = 2^(1-k) / ((k+1)(k+2)); equals 1/((k+1)(k+2)) only at k = 1
    for k in range(8):
        assert moment_closed(1, k) / 2**k == Fraction(2, 2**k * (k + 1) * (k + 2))
    assert moment_closed(1, 2) / 4 != Fraction(1, 12)
