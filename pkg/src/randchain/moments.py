"""Moments of the normalized area V_n = 2 vol(T_n) and of the missed area.

Everything here is for V_n; ``vol(T_n)^k`` moments are ``2^-k`` times these.
``q_{n,k} = C(n+k, k) E V_n^k`` is the normalized moment sequence.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, Dict, Iterator, Optional, Tuple

from .distribution import nn_moment_closed, pgf_recurrence
from .exact import binomial, esp_row, harmonic, harmonic_float

__all__ = [
    "MomentTable",
    "Route",
    "area_vertex_identity_check",
    "ev_vertex_product",
    "ev_small_n_closed",
    "evn_closed_12",
    "expected_area",
    "expected_volume_float",
    "missed_volume_closed",
    "missed_volume_moments",
    "moment_closed",
    "moment_recurrence",
    "moment_table",
    "q_1k_closed",
    "q_from_p",
    "q_n1_closed",
    "q_recurrence_check",
    "q_recurrence_residuals",
    "second_area_moment",
    "volume_variance",
]

Cell = Tuple[int, int]


class Route(str, Enum):
    FROM_P = "from-p"
    RECURRENCE = "recurrence"
    CLOSED = "closed"


@dataclass(frozen=True)
class MomentTable:
    """E V_n^k and q_{n,k} for 0 <= n <= max_n, 0 <= k <= max_k."""

    max_n: int
    max_k: int
    ev: Dict[Cell, Fraction] = field(repr=False)
    q: Dict[Cell, Fraction] = field(repr=False)
    route: Dict[Cell, Route] = field(repr=False)

    def __getitem__(self, cell: Cell) -> Fraction:
        return self.ev[cell]

    def cells(self) -> Iterator[Cell]:
        for n in range(self.max_n + 1):
            for k in range(self.max_k + 1):
                yield n, k


def _convention(n: int, k: int) -> Optional[Fraction]:
    if k == 0:
        return Fraction(1)
    if n == 0:
        return Fraction(0)
    return None


def _default_p(n: int, i: int) -> Fraction:
    return pgf_recurrence(n)[n].coefficient(i)


def q_from_p(
    n: int, k: int, p_source: Optional[Callable[[int, int], Fraction]] = None
) -> Fraction:
    """q_{n,k} = sum_{i=0}^n C(n+k-i, k) p_i^(n+k).

    ``p_source(m, i)`` supplies p_i^(m); defaults to PGF coefficients.
    """
    if n < 0 or k < 0:
        raise ValueError("n and k must be >= 0")
    p = p_source or _default_p
    return sum((binomial(n + k - i, k) * p(n + k, i) for i in range(n + 1)), Fraction(0))


def ev_vertex_product(n: int, k: int) -> Fraction:
    """E prod_{i=1}^k (1 - N_{n+k}/(n+i)), which equals E V_n^k."""
    g = pgf_recurrence(n + k)[n + k]
    total = Fraction(0)
    for j, pj in enumerate(g.coeffs):
        term = pj
        for i in range(1, k + 1):
            term *= 1 - Fraction(j, n + i)
        total += term
    return total


def moment_recurrence(max_n: int, max_k: int) -> MomentTable:
    """Fill E V_n^k by the double-sum recurrence over (m < n, l <= k)."""
    if max_n < 0 or max_k < 0:
        raise ValueError("max_n and max_k must be >= 0")
    ev: Dict[Cell, Fraction] = {}
    for k in range(max_k + 1):
        ev[(0, k)] = Fraction(int(k == 0))
    for n in range(1, max_n + 1):
        for k in range(max_k + 1):
            acc = Fraction(0)
            for ell in range(k + 1):
                ck = binomial(k, ell)
                for m in range(n):
                    v = ev[(m, ell)]
                    if v:
                        acc += Fraction(binomial(n - 1, m) * ck, binomial(n + k, m + ell)) * v
            ev[(n, k)] = Fraction(2 * n, (n + k) * (n + k + 1)) * acc
    q = {c: binomial(c[0] + c[1], c[1]) * v for c, v in ev.items()}
    return MomentTable(max_n, max_k, ev, q, {c: Route.RECURRENCE for c in ev})


def moment_closed(n: int, k: int) -> Fraction:
    """E V_n^k = sum_{i=1}^n sum_{l=i}^{n+k} (-1)^(l+i)
    C(n+k-i, k) C(n+k, l) / C(n+k, k) * c(i, l)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if k < 0:
        raise ValueError("k must be >= 0")
    top = n + k
    total = Fraction(0)
    for i in range(1, n + 1):
        inner = Fraction(0)
        for ell in range(i, top + 1):
            term = binomial(top, ell) * esp_row(ell)[i]
            inner += term if (ell + i) % 2 == 0 else -term
        total += binomial(top - i, k) * inner
    return total / binomial(top, k)


def moment_table(max_n: int, max_k: int, route: Route | str) -> MomentTable:
    """Moment table by any route; row n = 0 comes from the conventions."""
    route = Route(route)
    if route is Route.RECURRENCE:
        return moment_recurrence(max_n, max_k)
    ev: Dict[Cell, Fraction] = {}
    q: Dict[Cell, Fraction] = {}
    for n in range(max_n + 1):
        for k in range(max_k + 1):
            c = binomial(n + k, k)
            if route is Route.FROM_P:
                q[(n, k)] = q_from_p(n, k)
                ev[(n, k)] = q[(n, k)] / c
            else:
                v = _convention(n, k) if n == 0 else moment_closed(n, k)
                ev[(n, k)] = v
                q[(n, k)] = c * v
    return MomentTable(max_n, max_k, ev, q, {cell: route for cell in ev})


def ev_small_n_closed(n: int, k: int) -> Fraction:
    """Closed forms for E V_1^k and E V_2^k."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if n == 1:
        return Fraction(2, (k + 1) * (k + 2))
    if n == 2:
        return Fraction(4 * (k - 3), (k + 1) * (k + 2) * (k + 3)) + Fraction(
            8, (k + 1) * (k + 2) ** 2
        ) * harmonic(k + 2)
    raise ValueError("closed form only for n in {1, 2}")


def _ev1(n: int, h):
    return 1 - Fraction(1, 3 * (n + 1)) - 2 * h / (3 * (n + 1))


def _ev2(n: int, h, h2):
    return (
        1
        - Fraction(18 * n * n + 106 * n + 144, 27 * (n + 1) * (n + 2) * (n + 3))
        - (36 * n + 32) * h / (27 * (n + 1) * (n + 2))
        + 4 * (h * h + h2) / (9 * (n + 1) * (n + 2))
    )


def evn_closed_12(n: int, k: int) -> Fraction:
    """E V_n (k=1) and E V_n^2 (k=2) in harmonic numbers, any n >= 0."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if k == 1:
        return _ev1(n, harmonic(n + 1))
    if k == 2:
        return _ev2(n, harmonic(n + 2), harmonic(n + 2, 2))
    raise ValueError("closed form only for k in {1, 2}")


def expected_volume_float(n: int, k: int = 1) -> float:
    """Floating-point E V_n^k (k in {1, 2}) for large n."""
    if k == 1:
        return float(_ev1(n, harmonic_float(n + 1)))
    if k == 2:
        return float(_ev2(n, harmonic_float(n + 2), harmonic_float(n + 2, 2)))
    raise ValueError("k must be 1 or 2")


def expected_area(n: int) -> Fraction:
    """E vol(T_n) = 1/2 - 1/(6(n+1)) - H_{n+1}/(3(n+1))."""
    return Fraction(1, 2) - Fraction(1, 6 * (n + 1)) - harmonic(n + 1) / (3 * (n + 1))


def second_area_moment(n: int) -> Fraction:
    """E vol(T_n)^2 in the unnormalized (area) scale."""
    h, h2 = harmonic(n + 2), harmonic(n + 2, 2)
    d = (n + 1) * (n + 2)
    return (
        Fraction(1, 4)
        - Fraction(9 * n * n + 53 * n + 72, 54 * d * (n + 3))
        - (9 * n + 8) * h / (27 * d)
        + (h * h + h2) / (9 * d)
    )


def volume_variance(n: int) -> Fraction:
    """var(vol(T_n)); note var(V_n) is four times this."""
    if n < 1:
        raise ValueError("n must be >= 1")
    h, h2 = harmonic(n + 1), harmonic(n + 1, 2)
    a = n + 1
    b = n + 2
    return (
        (7 * n * n + 24 * n + 14) * h / (27 * a * a * b * b)
        - h * h / (9 * a * a * b)
        + h2 / (9 * a * b)
        - Fraction(
            55 * n**4 + 391 * n**3 + 962 * n**2 + 956 * n + 336,
            108 * a * a * b**3 * (n + 3),
        )
    )


def missed_volume_moments(n: int, k: int, ev: Optional[Callable[[int, int], Fraction]] = None) -> Fraction:
    """E D_n^k for the missed area D_n = 1 - V_n, by binomial expansion."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if k < 0:
        raise ValueError("k must be >= 0")
    ev = ev or moment_closed
    return sum(
        (binomial(k, ell) * (-1) ** ell * ev(n, ell) for ell in range(k + 1)),
        Fraction(0),
    )


def missed_volume_closed(n: int, k: int) -> Fraction:
    """Harmonic-number forms of E D_n and E D_n^2.

    The constant term of E D_n^2 is -(52n + 144)/(27(n+1)(n+2)(n+3)); this is
    what 1 - 2 E V_n + E V_n^2 reduces to, and it gives E D_0^2 = 1.
    """
    if k == 1:
        return (2 * harmonic(n + 1) + 1) / (3 * (n + 1))
    if k == 2:
        h, h2 = harmonic(n + 2), harmonic(n + 2, 2)
        d = (n + 1) * (n + 2)
        return (
            40 * h / (27 * d)
            - Fraction(52 * n + 144, 27 * d * (n + 3))
            + 4 * (h * h + h2) / (9 * d)
        )
    raise ValueError("closed form only for k in {1, 2}")


def area_vertex_identity_check(n: int) -> bool:
    """E V_n == 1 - E N_{n+1}/(n+1), exactly."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return evn_closed_12(n, 1) == 1 - nn_moment_closed(n + 1, 1) / (n + 1)


def q_n1_closed(n: int) -> Fraction:
    return n + Fraction(2, 3) - Fraction(2, 3) * harmonic(n + 1)


def q_1k_closed(k: int) -> Fraction:
    return Fraction(2, k + 2)


def q_recurrence_residuals(table: MomentTable, max_n: int, max_k: int) -> Dict[Cell, Fraction]:
    """Residual of the three-level q-recurrence at 1 <= n <= max_n, 2 <= k <= max_k."""
    if table.max_n < max_n + 1 or table.max_k < max_k:
        raise ValueError("table must cover n <= max_n + 1 and k <= max_k")
    q = table.q
    out: Dict[Cell, Fraction] = {}
    for n in range(1, max_n + 1):
        for k in range(2, max_k + 1):
            s = n + k
            rhs = (
                Fraction((s + 1) * (s + 2), 2) * q[(n + 1, k)]
                - s * (s + 1) * (q[(n, k)] + q[(n + 1, k - 1)])
                + Fraction((s - 1) * s, 2) * (q[(n - 1, k)] + 2 * q[(n, k - 1)] + q[(n + 1, k - 2)])
            )
            out[(n, k)] = q[(n, k)] - rhs
    return out


def q_recurrence_check(max_n: int, max_k: int, table: Optional[MomentTable] = None) -> bool:
    """The q-recurrence holds exactly on a table computed by another route,
    and the k = 1 column and n = 1 row match their closed forms."""
    if table is None:
        table = moment_recurrence(max_n + 1, max(max_k, 1))
    residuals = q_recurrence_residuals(table, max_n, max_k)
    if any(r != 0 for r in residuals.values()):
        return False
    cols_ok = all(table.q[(n, 1)] == q_n1_closed(n) for n in range(0, max_n + 2))
    rows_ok = all(table.q[(1, k)] == q_1k_closed(k) for k in range(0, table.max_k + 1))
    return cols_ok and rows_ok
