"""Generating-function identities for the normalized moments.

Q(x, y) = sum q_{n,k} x^n y^k is handled as an exact truncated bivariate
series. The hypergeometric parameter beta = (1 + sqrt(1 + 8s))/2 is never
represented exactly: exact statements go through the polynomial identity
(beta)_m (1 - beta)_m = prod_{i<m} (i(i+1) - 2t), and beta itself only
appears in the floating-point checks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Tuple

from .distribution import pgf_recurrence, pk_closed
from .exact import BivariateSeries, RationalPoly, binomial
from .moments import MomentTable, moment_recurrence

__all__ = [
    "EULER_GRID",
    "HypCoeffSequence",
    "diagonal_probability_identity",
    "euler_transform_check",
    "euler_transform_residual",
    "hyp_coeffs",
    "hypergeom_numeric",
    "initial_conditions_check",
    "l_series_numeric",
    "pde_residual",
    "pde_residual_check",
    "pgf_via_hypergeom",
    "q_series_from_pgf",
    "q_truncated",
    "qtilde_identity_check",
]

NUMERIC_TOL = 1e-9
HYP_TERMS = 80
L_TERMS = 60

# (s, z) pairs for the numeric checks, restricted to |z| < 1/(|s| + |1 - s|)
EULER_GRID: Tuple[Tuple[Fraction, float], ...] = tuple(
    (s, z)
    for s in (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1), Fraction(2))
    for z in (0.1, -0.1, 0.25, -0.25)
    if abs(z) < 1.0 / (abs(s) + abs(1 - s))
)


@dataclass(frozen=True)
class HypCoeffSequence:
    """h_m(t) = prod_{i<m} (i(i+1) - 2t) / (m! (m+1)!), m = 0..max_m."""

    max_m: int
    h: Tuple[RationalPoly, ...]

    def __getitem__(self, m: int) -> RationalPoly:
        return self.h[m]


def hyp_coeffs(max_m: int) -> HypCoeffSequence:
    if max_m < 0:
        raise ValueError("max_m must be >= 0")
    out = [RationalPoly([1])]
    prod = RationalPoly([1])
    for m in range(1, max_m + 1):
        i = m - 1
        prod = prod * RationalPoly([i * (i + 1), -2])
        out.append(prod.scale(Fraction(1, math.factorial(m) * math.factorial(m + 1))))
    return HypCoeffSequence(max_m, tuple(out))


def pgf_via_hypergeom(n: int, coeffs: Optional[HypCoeffSequence] = None) -> RationalPoly:
    """G_n(t) as [z^n] of sum_m h_m(t) (z/(z-1))^m.

    (z/(z-1))^m = (-1)^m sum_j C(m+j-1, j) z^(m+j), hence
    [z^n] = sum_{m=1}^n (-1)^m C(n-1, n-m) h_m(t) for n >= 1.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return RationalPoly([1])
    if coeffs is None or coeffs.max_m < n:
        coeffs = hyp_coeffs(n)
    total = RationalPoly()
    for m in range(1, n + 1):
        total = total + coeffs[m].scale((-1) ** m * binomial(n - 1, n - m))
    return total


def hypergeom_numeric(a: float, b: float, c: float, z: float, terms: int = HYP_TERMS) -> float:
    """Partial sum of the Gauss series sum_{n<terms} (a)_n (b)_n z^n / (n! (c)_n)."""
    if terms < 1:
        raise ValueError("terms must be >= 1")
    if abs(z) >= 1:
        raise ValueError(f"|z| must be < 1 for the Gauss series (z={z})")
    if c <= 0 and float(c).is_integer():
        raise ValueError(f"c must not be a nonpositive integer (c={c})")
    term = 1.0
    acc = 1.0
    for n in range(terms - 1):
        term *= (a + n) * (b + n) / ((n + 1) * (c + n)) * z
        acc += term
    return acc


def _beta(s: float) -> float:
    if s < -0.125:
        raise ValueError("beta is real only for s >= -1/8")
    return 0.5 + 0.5 * math.sqrt(1.0 + 8.0 * s)


def l_series_numeric(s: Fraction, z: float, terms: int = L_TERMS) -> float:
    """sum_{l <= terms} z^l G_l(s), with G_l(s) evaluated exactly first."""
    pgfs = pgf_recurrence(terms)
    return math.fsum(z**ell * float(pgfs[ell].evaluate(Fraction(s))) for ell in range(terms + 1))


def euler_transform_residual(
    s: Fraction, z: float, terms: int = HYP_TERMS, l_terms: int = L_TERMS
) -> float:
    """Largest pairwise gap between (1-z)^beta F(beta, beta+1; 2; z),
    F(beta, 1-beta; 2; z/(z-1)) and the exact-coefficient L-series."""
    beta = _beta(float(s))
    left = (1.0 - z) ** beta * hypergeom_numeric(beta, beta + 1.0, 2.0, z, terms)
    right = hypergeom_numeric(beta, 1.0 - beta, 2.0, z / (z - 1.0), terms)
    series = l_series_numeric(s, z, l_terms)
    return max(abs(left - right), abs(left - series), abs(right - series))


def euler_transform_check(s: Fraction, z: float, terms: int = HYP_TERMS, tol: float = NUMERIC_TOL) -> bool:
    if abs(z) >= 1.0 / (abs(float(s)) + abs(1.0 - float(s))):
        raise ValueError("z outside the convergence domain of the L-series")
    return euler_transform_residual(s, z, terms) < tol


def q_series_from_pgf(D: int) -> BivariateSeries:
    """Q truncated at total degree D, as sum_l (x+y)^l G_l(x/(x+y)),
    i.e. sum_l sum_i p_i^(l) x^i (x+y)^(l-i)."""
    pgfs = pgf_recurrence(D)
    coeffs: Dict[Tuple[int, int], Fraction] = {}
    for ell in range(D + 1):
        for i, p in enumerate(pgfs[ell].coeffs):
            if p == 0:
                continue
            rest = ell - i
            for j in range(rest + 1):
                key = (i + rest - j, j)
                coeffs[key] = coeffs.get(key, Fraction(0)) + p * binomial(rest, j)
    return BivariateSeries(D, coeffs)


def q_truncated(D: int, table: Optional[MomentTable] = None) -> BivariateSeries:
    """Q truncated at total degree D from a moment table (default: the
    double-sum recurrence)."""
    if D < 0:
        raise ValueError("D must be >= 0")
    if table is None:
        table = moment_recurrence(D, D)
    elif table.max_n < D or table.max_k < D:
        raise ValueError("moment table does not reach total degree D")
    return BivariateSeries(
        D, {(n, k): table.q[(n, k)] for n in range(D + 1) for k in range(D + 1 - n)}
    )


def qtilde_identity_check(D: int, Q: Optional[BivariateSeries] = None) -> bool:
    """(n+k)(n+k+1) q_{n,k} == [x^n y^k] 2x Q (1-x-y)^-2 for n + k <= D."""
    Q = Q if Q is not None else q_truncated(D)
    rhs = (Q * BivariateSeries.inverse_power_one_minus_sum(D, 2)).shift(1, 0).truncate(D).scale(2)
    lhs = BivariateSeries(
        D, {(n, k): (n + k) * (n + k + 1) * c for (n, k), c in Q.coeffs.items()}
    )
    return lhs == rhs


def pde_residual(Q: BivariateSeries) -> BivariateSeries:
    """(1-x-y)^2 (x^2 Qxx + y^2 Qyy + 2xy Qxy + 2x Qx + 2y Qy) - 2x Q, to order D."""
    D = Q.order
    euler = BivariateSeries(D)
    if D >= 1:
        qx, qy = Q.dx(), Q.dy()
        euler = qx.shift(1, 0).scale(2) + qy.shift(0, 1).scale(2)
    if D >= 2:
        # second-order terms have no monomials below total degree 2
        euler = euler + qx.dx().shift(2, 0) + qy.dy().shift(0, 2) + qx.dy().shift(1, 1).scale(2)
    cleared = euler * BivariateSeries.one_minus_sum_power(D, 2)
    return cleared - Q.shift(1, 0).truncate(D).scale(2)


def pde_residual_check(D: int, Q: Optional[BivariateSeries] = None) -> bool:
    Q = Q if Q is not None else q_truncated(D)
    return pde_residual(Q).is_zero()


def initial_conditions_check(D: int, Q: Optional[BivariateSeries] = None) -> bool:
    """Boundary data of Q, coefficientwise to order D:

    Q(0, y) = 1, Q(x, 0) = 1/(1-x), d/dy Q(0, y) = 0, d/dx Q(x, 0) = (1-x)^-2,
    d/dx Q(0, y) = 2 sum_{l>=2} y^(l-2)/l.
    """
    Q = Q if Q is not None else q_truncated(D)
    ok = Q.at_x0() == [Fraction(int(j == 0)) for j in range(D + 1)]
    ok &= Q.at_y0() == [Fraction(1)] * (D + 1)
    if D >= 1:
        qx, qy = Q.dx(), Q.dy()
        ok &= qy.at_x0() == [Fraction(0)] * D
        ok &= qx.at_y0() == [Fraction(n + 1) for n in range(D)]
        ok &= qx.at_x0() == [Fraction(2, j + 2) for j in range(D)]
    return bool(ok)


def diagonal_probability_identity(max_ell: int) -> bool:
    """p_l^(l) == 2^l / (l! (l+1)!) for l <= max_ell, via the closed form and
    the leading coefficient of the recurrence PGF."""
    pgfs = pgf_recurrence(max_ell)
    for ell in range(max_ell + 1):
        target = Fraction(2**ell, math.factorial(ell) * math.factorial(ell + 1))
        if pk_closed(ell, ell) != target or pgfs[ell].coefficient(ell) != target:
            return False
    return True
