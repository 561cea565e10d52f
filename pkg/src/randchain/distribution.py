"""Distribution of the vertex count N_n of the random convex chain.

Four independent routes to p_k^(n) = P(N_n = k):

* ``pk_composition``  -- sum over compositions of n (exponential; oracle only)
* ``pk_table_recurrence`` -- second-order recurrence in n for fixed k
* ``pgf_recurrence``  -- three-term recurrence for the generating polynomials
* ``pk_closed``       -- alternating sum over elementary symmetric constants
"""
from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Tuple

from .exact import RationalPoly, binomial, esp_c, esp_row, harmonic, harmonic_float

__all__ = [
    "COMPOSITION_CAP",
    "CompositionCapError",
    "expected_vertices_float",
    "PgfSequence",
    "nn_moment",
    "nn_moment_closed",
    "pgf_closed",
    "pgf_recurrence",
    "pk_closed",
    "pk_composition",
    "pk_row",
    "pk_table_recurrence",
]

COMPOSITION_CAP = 20


class CompositionCapError(ValueError):
    """Raised when the composition enumeration would exceed its size cap."""


@dataclass(frozen=True)
class PgfSequence:
    max_n: int
    polys: Tuple[RationalPoly, ...]

    def __getitem__(self, n: int) -> RationalPoly:
        return self.polys[n]

    def __len__(self) -> int:
        return len(self.polys)

    def probability(self, n: int, k: int) -> Fraction:
        return self.polys[n].coefficient(k)


_pgf_cache: List[RationalPoly] = [RationalPoly([1]), RationalPoly([0, 1])]
_pgf_lock = threading.Lock()


def pgf_recurrence(max_n: int) -> PgfSequence:
    """G_0..G_max_n from the three-term recurrence seeded with G_0 = 1, G_1 = t."""
    if max_n < 0:
        raise ValueError("max_n must be >= 0")
    if len(_pgf_cache) <= max_n:
        with _pgf_lock:
            while len(_pgf_cache) <= max_n:
                n = len(_pgf_cache)
                g1, g2 = _pgf_cache[n - 1], _pgf_cache[n - 2]
                factor = RationalPoly([Fraction(2 * (n - 1), n + 1), Fraction(2, n * (n + 1))])
                _pgf_cache.append(
                    factor * g1 - g2.scale(Fraction((n - 1) * (n - 2), n * (n + 1)))
                )
    return PgfSequence(max_n, tuple(_pgf_cache[: max_n + 1]))


def pgf_closed(n: int) -> RationalPoly:
    """G_n(t) = sum_{l=0}^n (-1)^l C(n, l) prod_{i<=l} (1 - 2t/(i(i+1)))."""
    if n < 0:
        raise ValueError("n must be >= 0")
    total = RationalPoly([1])
    prefix = RationalPoly([1])
    for ell in range(1, n + 1):
        prefix = prefix * RationalPoly([1, Fraction(-2, ell * (ell + 1))])
        total = total + prefix.scale((-1) ** ell * binomial(n, ell))
    return total


def _composition_term(parts: Tuple[int, ...]) -> Fraction:
    num = 1
    den = 1
    s = 0
    for i in parts:
        s += i
        num *= i
        den *= s * (s + 1)
    return Fraction(num, den)


def pk_composition(n: int, k: int, cap: int = COMPOSITION_CAP) -> Fraction:
    """p_k^(n) by direct summation over all compositions of n into k parts."""
    if n > cap:
        raise CompositionCapError(
            f"composition enumeration is capped at n <= {cap} (got n={n})"
        )
    if n == 0:
        return Fraction(int(k == 0))
    if k < 1 or k > n:
        return Fraction(0)
    total = Fraction(0)
    # cut points c_1 < ... < c_{k-1} in 1..n-1 give parts c_{j} - c_{j-1}
    for cuts in itertools.combinations(range(1, n), k - 1):
        bounds = (0,) + cuts + (n,)
        parts = tuple(bounds[j + 1] - bounds[j] for j in range(k))
        total += _composition_term(parts)
    return 2**k * total


def pk_closed(n: int, k: int) -> Fraction:
    """p_k^(n) = sum_{l=k}^n (-1)^(l+k) C(n, l) c(k, l)."""
    if n < 0 or k < 0 or k > n:
        return Fraction(0)
    total = Fraction(0)
    for ell in range(k, n + 1):
        term = binomial(n, ell) * esp_c(k, ell)
        total += term if (ell + k) % 2 == 0 else -term
    return total


def pk_row(n: int) -> List[Fraction]:
    """[p_0^(n), ..., p_n^(n)] via the closed form, sharing one pass over l."""
    if n < 0:
        raise ValueError("n must be >= 0")
    row = [Fraction(0)] * (n + 1)
    for ell in range(n + 1):
        b = binomial(n, ell)
        cs = esp_row(ell)
        for k in range(ell + 1):
            term = b * cs[k]
            row[k] += term if (ell + k) % 2 == 0 else -term
    return row


def pk_table_recurrence(max_n: int) -> Dict[Tuple[int, int], Fraction]:
    """Table {(n, k): p_k^(n)} for 0 <= k <= n <= max_n from the recurrence

        n(n+1)/2 p_k^(n) = (n-1)n p_k^(n-1) - (n-2)(n-1)/2 p_k^(n-2) + p_{k-1}^(n-1).
    """
    if max_n < 1:
        raise ValueError("max_n must be >= 1")
    table: Dict[Tuple[int, int], Fraction] = {(0, 0): Fraction(1)}

    def p(n: int, k: int) -> Fraction:
        return table.get((n, k), Fraction(0))

    for n in range(1, max_n + 1):
        table[(n, 0)] = Fraction(0)
        for k in range(1, n + 1):
            rhs = (n - 1) * n * p(n - 1, k) - Fraction((n - 2) * (n - 1), 2) * p(n - 2, k) + p(n - 1, k - 1)
            table[(n, k)] = rhs * Fraction(2, n * (n + 1))
    return table


def nn_moment(n: int, m: int) -> Fraction:
    """Raw moment E[N_n^m] summed from the PGF coefficients."""
    if n < 0 or m < 0:
        raise ValueError("n and m must be >= 0")
    g = pgf_recurrence(n)[n]
    return sum((k**m * c for k, c in enumerate(g.coeffs)), Fraction(0))


def nn_moment_closed(n: int, m: int) -> Fraction:
    """Harmonic-number closed forms for E N_n (m=1) and E N_n^2 (m=2)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    h = harmonic(n)
    if m == 1:
        return Fraction(2, 3) * h + Fraction(1, 3)
    if m == 2:
        return (
            Fraction(4, 9) * h * h
            + Fraction(22, 27) * h
            + Fraction(4, 9) * harmonic(n, 2)
            - Fraction(25, 27)
            + Fraction(4, 9 * (n + 1))
        )
    raise ValueError("closed form only for m in {1, 2}; use nn_moment")


def expected_vertices_float(n: int) -> float:
    """E N_n in floating point, for n far beyond exact reach."""
    return 2.0 / 3.0 * harmonic_float(n) + 1.0 / 3.0
