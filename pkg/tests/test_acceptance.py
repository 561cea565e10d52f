"""Acceptance gate. Run with ``pytest tests/test_acceptance.py``; a
PASS/FAIL line per criterion is printed in the terminal summary."""
import math
import os
import subprocess
import sys
from fractions import Fraction

import pytest

from randchain.distribution import (
    nn_moment,
    nn_moment_closed,
    pgf_closed,
    pgf_recurrence,
    pk_closed,
    pk_composition,
    pk_table_recurrence,
)
from randchain.exact import harmonic, harmonic_float
from randchain.genfunc import (
    EULER_GRID,
    diagonal_probability_identity,
    euler_transform_residual,
    initial_conditions_check,
    pde_residual_check,
    pgf_via_hypergeom,
    q_truncated,
    qtilde_identity_check,
)
from randchain.moments import (
    Route,
    area_vertex_identity_check,
    ev_small_n_closed,
    evn_closed_12,
    expected_volume_float,
    moment_closed,
    moment_recurrence,
    moment_table,
    q_from_p,
    q_recurrence_check,
    volume_variance,
)
from randchain.simulator import compare_to_exact, estimate

MC_SEED = 20240917
MC_SAMPLES = 10**6


@pytest.mark.criterion(1, "probability routes agree exactly for k <= n <= 15")
def test_probability_routes():
    table = pk_table_recurrence(15)
    pgfs = pgf_recurrence(15)
    for n in range(16):
        for k in range(n + 1):
            values = {
                pk_composition(n, k),
                table[(n, k)],
                pgfs.probability(n, k),
                pk_closed(n, k),
            }
            assert len(values) == 1, (n, k, values)


@pytest.mark.criterion(2, "anchored closed-form values reproduced exactly")
def test_anchored_values():
    pgfs = pgf_recurrence(30)
    for n in range(1, 31):
        assert pk_closed(n, 1) == pgfs.probability(n, 1) == Fraction(2, n + 1)
        diag = Fraction(2**n, math.factorial(n) * math.factorial(n + 1))
        assert pk_closed(n, n) == pgfs.probability(n, n) == diag
    for n in range(1, 51):
        h, h2 = harmonic(n), harmonic(n, 2)
        assert nn_moment(n, 1) == Fraction(2, 3) * h + Fraction(1, 3)
        en2 = (
            Fraction(4, 9) * h * h
            + Fraction(22, 27) * h
            + Fraction(4, 9) * h2
            - Fraction(25, 27)
            + Fraction(4, 9 * (n + 1))
        )
        assert nn_moment(n, 2) == nn_moment_closed(n, 2) == en2
    for idx in range(1, 51):
        assert q_from_p(1, idx) == Fraction(2, idx + 2)
        assert q_from_p(idx, 1) == idx + Fraction(2, 3) - Fraction(2, 3) * harmonic(idx + 1)


@pytest.mark.criterion(3, "moment routes agree exactly for n, k <= 12")
def test_moment_routes():
    rec, clo, fp = (moment_table(12, 12, r) for r in (Route.RECURRENCE, Route.CLOSED, Route.FROM_P))
    for n in range(1, 13):
        for k in range(13):
            assert rec[(n, k)] == clo[(n, k)] == fp[(n, k)], (n, k)
    for k in range(13):
        assert rec[(1, k)] == ev_small_n_closed(1, k)
        assert rec[(2, k)] == ev_small_n_closed(2, k)
    for n in range(1, 13):
        assert rec[(n, 1)] == evn_closed_12(n, 1)
        assert rec[(n, 2)] == evn_closed_12(n, 2)
    assert rec[(2, 2)] == ev_small_n_closed(2, 2) == evn_closed_12(2, 2) == Fraction(101, 360)


@pytest.mark.criterion(4, "recurrence, series, area-vertex and variance identities hold exactly")
def test_identity_residuals():
    closed = moment_table(11, 10, Route.CLOSED)
    assert q_recurrence_check(10, 10, table=closed)
    assert q_recurrence_check(10, 10, table=moment_recurrence(11, 10))
    Q = q_truncated(12)
    assert qtilde_identity_check(12, Q)
    assert pde_residual_check(12, Q)
    assert initial_conditions_check(12, Q)
    for n in range(1, 51):
        assert area_vertex_identity_check(n)
        ev1, ev2 = moment_closed(n, 1), moment_closed(n, 2)
        assert volume_variance(n) == (ev2 - ev1**2) / 4
    assert volume_variance(1) == Fraction(1, 72)


@pytest.mark.criterion(5, "hypergeometric layer: exact PGF route, numeric transforms, diagonal")
def test_hypergeometric_layer():
    pgfs = pgf_recurrence(20)
    for n in range(21):
        assert pgf_via_hypergeom(n) == pgf_closed(n) == pgfs[n]
    for s, z in EULER_GRID:
        assert euler_transform_residual(s, z) < 1e-9, (s, z)
    assert diagonal_probability_identity(30)


def _jobs():
    return int(os.environ.get("RANDCHAIN_JOBS", min(4, os.cpu_count() or 1)))


@pytest.mark.slow
@pytest.mark.criterion(6, "Monte Carlo within 4 standard errors, chi-square at 1e-4")
@pytest.mark.parametrize("n", range(1, 11))
def test_monte_carlo(n):
    summary = estimate(n, MC_SAMPLES, MC_SEED, max_k=2, jobs=_jobs())
    report = compare_to_exact(summary)
    for check in report["checks"]:
        assert check["pass"], check
    assert report["chi_square"]["pass"], report["chi_square"]
    if n in (1, 2):
        ev = {1: Fraction(1, 3), 2: Fraction(13, 27)}[n]
        assert next(c for c in report["checks"] if c["statistic"] == "E[V^1]")["exact"] == ev
    if n == 10:
        en = Fraction(2, 3) * harmonic(10) + Fraction(1, 3)
        assert next(c for c in report["checks"] if c["statistic"] == "E[N]")["exact"] == en


@pytest.mark.criterion(7, "asymptotic sanity bands at n = 10^5")
def test_asymptotics():
    n = 10**5
    missed = n * (1 - expected_volume_float(n)) / math.log(n)
    assert 0.6 <= missed <= 0.75, missed
    vertices = (2 / 3 * harmonic_float(n) + 1 / 3) / (2 / 3 * math.log(n))
    assert 0.9 <= vertices <= 1.1, vertices


@pytest.mark.criterion(8, "simulate output is byte-identical for any worker count")
def test_determinism():
    base = [sys.executable, "-m", "randchain", "simulate", "--n", "6", "--samples", "150000", "--seed", "99"]
    outputs = [
        subprocess.run(base + ["--jobs", str(j)], check=True, capture_output=True).stdout
        for j in (1, 1, 2, 3)
    ]
    assert outputs[0]
    assert all(o == outputs[0] for o in outputs)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-rN"]))
