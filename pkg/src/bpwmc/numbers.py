"""Exact-number helpers shared by the certification code."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

import mpmath

# rational enclosure of e, good to ~1e-30
E_LOWER = Fraction(2718281828459045235360287471352, 10**30)
E_UPPER = Fraction(2718281828459045235360287471353, 10**30)


def as_rational(x) -> Fraction:
    """Exact rational from int, Fraction, ``"p/q"`` or decimal string, or float
    (the float's exact binary value)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        return Fraction(x)
    return Fraction(float(x))


def frac_json(x):
    """JSON-friendly number: ints stay ints, other rationals become floats."""
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else float(x)
    return x


def mp_exp(x) -> mpmath.mpf:
    with mpmath.workdps(50):
        return mpmath.exp(mpmath.mpf(x.numerator) / x.denominator if isinstance(x, Fraction) else x)
