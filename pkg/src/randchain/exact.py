"""Exact arithmetic substrate: rationals, combinatorial numbers, polynomials
and total-degree-truncated bivariate series.

Rationals are :class:`fractions.Fraction` (always reduced, positive
denominator). Python ``int`` values are accepted wherever a rational is
expected.
"""
from __future__ import annotations

import math
import threading
from fractions import Fraction
from numbers import Rational
from typing import Dict, Iterable, Iterator, List, Tuple, Union

__all__ = [
    "BivariateSeries",
    "RationalPoly",
    "binomial",
    "esp_c",
    "esp_row",
    "fmt_rational",
    "harmonic",
    "harmonic_float",
    "parse_rational",
    "rising_factorial",
]

Number = Union[int, Fraction]


def fmt_rational(x: Number) -> str:
    """Serialize as ``"p/q"`` in lowest terms (integers as ``"p/1"``)."""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(s: str) -> Fraction:
    return Fraction(s)


def binomial(n: int, k: int) -> int:
    """C(n, k), zero outside 0 <= k <= n."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


def rising_factorial(a: Number, n: int):
    """Pochhammer symbol (a)_n = a(a+1)...(a+n-1), with (a)_0 = 1."""
    if n < 0:
        raise ValueError("n must be >= 0")
    out = 1
    for i in range(n):
        out *= a + i
    return out


_harmonic_prefixes: Dict[int, List[Fraction]] = {}
_harmonic_lock = threading.Lock()


def harmonic(n: int, order: int = 1) -> Fraction:
    """Generalised harmonic number H_n^{(order)} = sum_{i<=n} i^{-order}."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if order < 1:
        raise ValueError("order must be >= 1")
    prefix = _harmonic_prefixes.get(order)
    if prefix is None or len(prefix) <= n:
        with _harmonic_lock:
            prefix = _harmonic_prefixes.setdefault(order, [Fraction(0)])
            while len(prefix) <= n:
                i = len(prefix)
                prefix.append(prefix[-1] + Fraction(1, i**order))
    return prefix[n]


def harmonic_float(n: int, order: int = 1) -> float:
    """Floating-point H_n^{(order)}, correctly rounded partial sum."""
    return math.fsum(1.0 / i**order for i in range(1, n + 1))


# -- elementary symmetric constants c(k, l) = e_k(a_1..a_l), a_j = 2/(j(j+1))

_esp_rows: List[Tuple[Fraction, ...]] = [(Fraction(1),)]
_esp_lock = threading.Lock()


def esp_row(ell: int) -> Tuple[Fraction, ...]:
    """Row (c(0, ell), ..., c(ell, ell)); built incrementally and memoized."""
    if ell < 0:
        raise ValueError("ell must be >= 0")
    if ell >= len(_esp_rows):
        with _esp_lock:
            while len(_esp_rows) <= ell:
                j = len(_esp_rows)
                a = Fraction(2, j * (j + 1))
                prev = _esp_rows[-1]
                row = [Fraction(1)]
                for k in range(1, j):
                    row.append(prev[k] + a * prev[k - 1])
                row.append(a * prev[j - 1])
                _esp_rows.append(tuple(row))
    return _esp_rows[ell]


def esp_c(k: int, ell: int) -> Fraction:
    """c(k, ell) = e_k(a_1, ..., a_ell); zero for k > ell."""
    if k < 0 or ell < 0:
        raise ValueError("k and ell must be >= 0")
    if k > ell:
        return Fraction(0)
    return esp_row(ell)[k]


class RationalPoly:
    """Dense univariate polynomial with exact rational coefficients.

    ``coeffs[i]`` is the coefficient of ``t**i``; trailing zeros are stripped
    so the zero polynomial has an empty coefficient tuple.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Number] = ()):
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: Tuple[Fraction, ...] = tuple(cs)

    @classmethod
    def constant(cls, c: Number) -> "RationalPoly":
        return cls([c])

    @classmethod
    def monomial(cls, degree: int, c: Number = 1) -> "RationalPoly":
        return cls([0] * degree + [c])

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def coefficient(self, i: int) -> Fraction:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return Fraction(0)

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.coeffs)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, RationalPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == RationalPoly([other]).coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        if not self.coeffs:
            return "RationalPoly(0)"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            terms.append(f"{c}" if i == 0 else f"{c}*t^{i}")
        return "RationalPoly(" + " + ".join(terms) + ")"

    def _coerce(self, other) -> "RationalPoly":
        if isinstance(other, RationalPoly):
            return other
        if isinstance(other, Rational):
            return RationalPoly([other])
        raise TypeError(f"cannot combine RationalPoly with {type(other).__name__}")

    def __add__(self, other) -> "RationalPoly":
        other = self._coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return RationalPoly(self.coefficient(i) + other.coefficient(i) for i in range(n))

    __radd__ = __add__

    def __neg__(self) -> "RationalPoly":
        return RationalPoly(-c for c in self.coeffs)

    def __sub__(self, other) -> "RationalPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "RationalPoly":
        return self._coerce(other) - self

    def scale(self, c: Number) -> "RationalPoly":
        return RationalPoly(c * a for a in self.coeffs)

    def __mul__(self, other) -> "RationalPoly":
        if isinstance(other, Rational):
            return self.scale(other)
        other = self._coerce(other)
        if not self.coeffs or not other.coeffs:
            return RationalPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return RationalPoly(out)

    __rmul__ = __mul__

    def __call__(self, t):
        return self.evaluate(t)

    def evaluate(self, t):
        """Horner evaluation; exact for rational ``t``, float for float ``t``."""
        if isinstance(t, float):
            acc = 0.0
            for c in reversed(self.coeffs):
                acc = acc * t + float(c)
            return acc
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def derivative(self) -> "RationalPoly":
        return RationalPoly(i * c for i, c in enumerate(self.coeffs) if i > 0)


Key = Tuple[int, int]


class BivariateSeries:
    """Formal power series in x, y truncated at total degree ``order``.

    Coefficients live in a dict keyed by ``(i, j)`` for ``x**i * y**j``;
    absent keys are zero and no key has ``i + j > order``.
    """

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs: Dict[Key, Number] | None = None):
        if order < 0:
            raise ValueError("truncation order must be >= 0")
        self.order = order
        self.coeffs: Dict[Key, Fraction] = {}
        for (i, j), c in (coeffs or {}).items():
            if i < 0 or j < 0:
                raise ValueError("negative exponent")
            if i + j <= order and c != 0:
                self.coeffs[(i, j)] = Fraction(c)

    @classmethod
    def zero(cls, order: int) -> "BivariateSeries":
        return cls(order)

    @classmethod
    def inverse_power_one_minus_sum(cls, order: int, power: int) -> "BivariateSeries":
        """(1 - x - y)^(-power): coefficient of x^a y^b is
        C(a+b+power-1, power-1) * C(a+b, a)."""
        if power < 1:
            raise ValueError("power must be >= 1")
        out = {}
        for d in range(order + 1):
            outer = math.comb(d + power - 1, power - 1)
            for a in range(d + 1):
                out[(a, d - a)] = outer * math.comb(d, a)
        return cls(order, out)

    @classmethod
    def one_minus_sum_power(cls, order: int, power: int) -> "BivariateSeries":
        """The polynomial (1 - x - y)^power, truncated."""
        out = {}
        for d in range(min(power, order) + 1):
            outer = (-1) ** d * math.comb(power, d)
            for a in range(d + 1):
                out[(a, d - a)] = outer * math.comb(d, a)
        return cls(order, out)

    def coefficient(self, i: int, j: int) -> Fraction:
        return self.coeffs.get((i, j), Fraction(0))

    def __getitem__(self, key: Key) -> Fraction:
        return self.coefficient(*key)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BivariateSeries):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    def __repr__(self) -> str:
        return f"BivariateSeries(order={self.order}, terms={len(self.coeffs)})"

    def _check_order(self, other: "BivariateSeries") -> None:
        if not isinstance(other, BivariateSeries):
            raise TypeError(f"expected BivariateSeries, got {type(other).__name__}")
        if other.order != self.order:
            raise ValueError(
                f"mismatched truncation orders: {self.order} vs {other.order}"
            )

    def __add__(self, other: "BivariateSeries") -> "BivariateSeries":
        self._check_order(other)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, 0) + c
        return BivariateSeries(self.order, out)

    def __neg__(self) -> "BivariateSeries":
        return BivariateSeries(self.order, {k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other: "BivariateSeries") -> "BivariateSeries":
        return self + (-other)

    def scale(self, c: Number) -> "BivariateSeries":
        return BivariateSeries(self.order, {k: c * v for k, v in self.coeffs.items()})

    def __mul__(self, other) -> "BivariateSeries":
        if isinstance(other, Rational):
            return self.scale(other)
        self._check_order(other)
        D = self.order
        out: Dict[Key, Fraction] = {}
        for (i1, j1), a in self.coeffs.items():
            budget = D - i1 - j1
            for (i2, j2), b in other.coeffs.items():
                if i2 + j2 <= budget:
                    k = (i1 + i2, j1 + j2)
                    out[k] = out.get(k, 0) + a * b
        return BivariateSeries(D, out)

    __rmul__ = __mul__

    def shift(self, dx: int, dy: int) -> "BivariateSeries":
        """Multiply by x^dx y^dy; the result is exact to order + dx + dy."""
        return BivariateSeries(
            self.order + dx + dy,
            {(i + dx, j + dy): c for (i, j), c in self.coeffs.items()},
        )

    def truncate(self, order: int) -> "BivariateSeries":
        if order > self.order:
            raise ValueError("cannot raise the truncation order")
        return BivariateSeries(order, self.coeffs)

    def dx(self) -> "BivariateSeries":
        """Partial derivative in x; exact only to total degree order - 1."""
        if self.order == 0:
            raise ValueError("derivative of an order-0 series has no exact coefficients")
        return BivariateSeries(
            self.order - 1,
            {(i - 1, j): i * c for (i, j), c in self.coeffs.items() if i > 0},
        )

    def dy(self) -> "BivariateSeries":
        if self.order == 0:
            raise ValueError("derivative of an order-0 series has no exact coefficients")
        return BivariateSeries(
            self.order - 1,
            {(i, j - 1): j * c for (i, j), c in self.coeffs.items() if j > 0},
        )

    def at_x0(self) -> List[Fraction]:
        """Coefficients of the univariate series Q(0, y), index = power of y."""
        return [self.coefficient(0, j) for j in range(self.order + 1)]

    def at_y0(self) -> List[Fraction]:
        return [self.coefficient(i, 0) for i in range(self.order + 1)]

    def max_total_degree(self) -> int:
        return max((i + j for i, j in self.coeffs), default=-1)

    def is_zero(self) -> bool:
        return not self.coeffs

