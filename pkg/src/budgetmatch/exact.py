"""Exact rational helpers and the golden ratio as an exactly comparable constant.

All sizes and utilities are :class:`fractions.Fraction`.  The golden ratio is
irrational, so it is represented by :data:`PHI`, an object that compares
exactly against rationals using squared forms instead of a float value.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Union

Num = Fraction
Bound = Union[Fraction, "GoldenRatio", float]


def to_num(value) -> Fraction:
    """Coerce an int, Fraction, or decimal/"p/q" string to a Fraction.

    Floats are refused: a binary float silently changes the value.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not an exact rational: {value!r}") from exc
    if isinstance(value, float):
        raise TypeError(f"float {value!r} is not exact; pass a string or Fraction")
    raise TypeError(f"cannot interpret {value!r} as a rational")


def format_num(value) -> str:
    """Render a Fraction as "p/q" (or "p" for integers); inf as "inf"."""
    if isinstance(value, GoldenRatio):
        return "phi"
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def at_least_inv_phi(q: Fraction) -> bool:
    """q >= 1/phi, decided exactly: 1/phi = (sqrt5 - 1)/2."""
    lhs = 2 * q + 1
    return lhs > 0 and lhs * lhs >= 5


def at_most_one_minus_inv_phi(q: Fraction) -> bool:
    """q <= 1 - 1/phi = (3 - sqrt5)/2, decided exactly (valid for q <= 3/2)."""
    rhs = 3 - 2 * q
    return rhs >= 0 and rhs * rhs >= 5


def _compare_phi(q: Fraction) -> int:
    """Sign of (q - phi); never 0 because phi is irrational."""
    # phi = (1 + sqrt5)/2, so q > phi  <=>  2q - 1 > sqrt5
    t = 2 * q - 1
    if t <= 0:
        return -1
    return 1 if t * t > 5 else -1


class GoldenRatio:
    """The golden ratio, exactly ordered against rationals and infinities."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def _cmp(self, other) -> int:
        if isinstance(other, GoldenRatio):
            return 0
        if isinstance(other, float):
            if math.isinf(other):
                return -1 if other > 0 else 1
            other = Fraction(other)
        if isinstance(other, (int, Fraction)):
            return -_compare_phi(Fraction(other))
        return NotImplemented

    def __lt__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c < 0

    def __le__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c >= 0

    def __eq__(self, other):
        return isinstance(other, GoldenRatio)

    def __hash__(self):
        return hash("golden-ratio")

    def __float__(self):
        return (1 + math.sqrt(5)) / 2

    def __repr__(self):
        return "PHI"


PHI = GoldenRatio()


def scaled_at_least(alpha: Bound, value: Fraction, target: Fraction) -> bool:
    """Exact test of ``alpha * value >= target`` for nonnegative value/target."""
    if value == 0:
        return target <= 0
    if isinstance(alpha, float) and math.isinf(alpha):
        return True
    return Fraction(target) / Fraction(value) <= alpha


def scaled_exceeds(target: Fraction, alpha: Bound, value: Fraction) -> bool:
    """Exact test of ``target > alpha * value`` (the blocking inequality)."""
    return not scaled_at_least(alpha, value, target)


def inv_phi_convergent(max_error: Fraction) -> Fraction:
    """Smallest Fibonacci ratio F(k)/F(k+1) strictly within ``max_error`` of 1/phi.

    Consecutive Fibonacci ratios are the continued-fraction convergents of
    1/phi; the distance test is exact.
    """
    max_error = Fraction(max_error)
    if max_error <= 0:
        raise ValueError("max_error must be positive")
    a, b = 1, 2
    while True:
        q = Fraction(a, b)
        # 1/phi in (q - e, q + e); 1/phi never equals a rational
        if at_least_inv_phi(q + max_error) and not at_least_inv_phi(q - max_error):
            return q
        a, b = b, a + b


def parse_bound(text: str) -> Bound:
    """Parse an alpha given on the command line: "p/q", decimal, "phi", or "inf"."""
    t = text.strip().lower()
    if t in ("phi", "φ"):
        return PHI
    if t in ("inf", "infinity", "∞"):
        return math.inf
    return to_num(t)
