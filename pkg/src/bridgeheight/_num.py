"""Small numeric conversion helpers shared across modules."""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational

import mpmath

DEFAULT_PRECISION = 50


def to_mp(value):
    """Convert an int, Fraction, float, complex or mpmath number to mpmath."""
    if isinstance(value, Fraction):
        return mpmath.mpf(value.numerator) / value.denominator
    if isinstance(value, Rational):
        return mpmath.mpf(int(value))
    if isinstance(value, complex):
        return mpmath.mpc(value.real, value.imag)
    if isinstance(value, (mpmath.mpf, mpmath.mpc)):
        return value
    return mpmath.mpf(value)


def mpf_to_fraction(value) -> Fraction:
    """Exact binary value of an mpf as a Fraction."""
    man, exp = mpmath.mpf(value).man_exp
    if exp >= 0:
        return Fraction(man * 2**exp)
    return Fraction(man, 2**-exp)


def dec(value, digits: int = DEFAULT_PRECISION) -> str:
    """Decimal string rendering used in every JSON/CSV output."""
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        value = to_mp(value)
    if isinstance(value, (int,)) and not isinstance(value, bool):
        return str(value)
    if isinstance(value, (complex, mpmath.mpc)):
        raise TypeError("use cdec for complex values")
    with mpmath.workdps(digits + 5):
        return mpmath.nstr(mpmath.mpf(value), digits, min_fixed=-5, max_fixed=5)


def cdec(value, digits: int = DEFAULT_PRECISION) -> list[str]:
    """Complex number as ``[re, im]`` decimal strings."""
    value = complex(value) if not isinstance(value, mpmath.mpc) else value
    return [dec(value.real, digits), dec(value.imag, digits)]
