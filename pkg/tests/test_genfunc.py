from fractions import Fraction

import pytest

from randchain.distribution import pgf_closed
from randchain.exact import BivariateSeries
from randchain.genfunc import (
    EULER_GRID,
    diagonal_probability_identity,
    euler_transform_check,
    euler_transform_residual,
    hyp_coeffs,
    hypergeom_numeric,
    initial_conditions_check,
    pde_residual,
    pde_residual_check,
    pgf_via_hypergeom,
    q_series_from_pgf,
    q_truncated,
    qtilde_identity_check,
)


def test_hypergeom_route():
    coeffs = hyp_coeffs(20)
    for n in range(21):
        assert pgf_via_hypergeom(n, coeffs) == pgf_closed(n)


def test_hypergeom_numeric():
    # 2F1(1, 1; 1; z) = 1/(1-z)
    assert hypergeom_numeric(1, 1, 1, 0.5) == pytest.approx(2.0, abs=1e-12)
    with pytest.raises(ValueError):
        hypergeom_numeric(1, 1, 1, 1.0)
    with pytest.raises(ValueError):
        hypergeom_numeric(1, 1, -2, 0.1)


def test_euler_grid():
    assert len(EULER_GRID) == 24
    for s, z in EULER_GRID:
        assert euler_transform_check(s, z)
    assert max(euler_transform_residual(s, z) for s, z in EULER_GRID) < 1e-12


def test_euler_outside_domain():
    with pytest.raises(ValueError):
        euler_transform_check(Fraction(2), 0.5)


@pytest.mark.parametrize("D", [0, 1, 2, 3, 6, 12])
def test_series_identities(D):
    Q = q_truncated(D)
    assert Q == q_series_from_pgf(D)
    assert qtilde_identity_check(D, Q)
    assert pde_residual_check(D, Q)
    assert initial_conditions_check(D, Q)


def test_pde_detects_perturbation():
    Q = q_truncated(8)
    bad = Q + BivariateSeries(8, {(3, 2): Fraction(1, 7)})
    assert not pde_residual(bad).is_zero()
    assert not qtilde_identity_check(8, bad)


def test_initial_conditions_detect_perturbation():
    Q = q_truncated(6)
    assert not initial_conditions_check(6, Q + BivariateSeries(6, {(1, 1): 1}))
    assert not initial_conditions_check(6, Q + BivariateSeries(6, {(0, 2): 1}))


def test_diagonal_identity():
    assert diagonal_probability_identity(30)
