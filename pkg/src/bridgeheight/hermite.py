"""Hermite polynomials, the signed family ``Q_r`` and Hankel-Gamma constants.

Two integer recurrences are generated:

* probabilist's Hermite ``He_{i+1}(x) = x He_i(x) - He_i'(x)``;
* ``Q_{r+1}(x) = -4x Q_r(x) + Q_r'(x)`` with ``Q_0 = 1``.

They are related by ``Q_r(x) = (-2)**r He_r(2x)``.  The tail expansion is
written in the basis ``Hhat_a(x) = (-1)**a Q_a(x) = 2**a He_a(2x)``, which
is what a Hankel integral of ``t**((a-1)/2) exp(-2 sqrt(2) x sqrt(t))``
produces.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath

from ._num import DEFAULT_PRECISION


@dataclass(frozen=True)
class IntPoly:
    """Polynomial with exact integer coefficients, lowest degree first."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        c = list(self.coeffs)
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c) if c else (0,))

    @property
    def degree(self) -> int:
        return -1 if self.coeffs == (0,) else len(self.coeffs) - 1

    @property
    def leading(self) -> int:
        return self.coeffs[-1]

    def is_zero(self) -> bool:
        return self.coeffs == (0,)

    def __add__(self, other: "IntPoly") -> "IntPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return IntPoly(tuple(x + y for x, y in zip(a, b)))

    def __neg__(self) -> "IntPoly":
        return IntPoly(tuple(-x for x in self.coeffs))

    def __sub__(self, other: "IntPoly") -> "IntPoly":
        return self + (-other)

    def scale(self, k: int) -> "IntPoly":
        return IntPoly(tuple(k * x for x in self.coeffs))

    def shift(self) -> "IntPoly":
        """Multiply by ``x``."""
        return IntPoly((0,) + self.coeffs)

    def derivative(self) -> "IntPoly":
        return IntPoly(tuple(i * self.coeffs[i] for i in range(1, len(self.coeffs))) or (0,))

    def dilate(self, a: int) -> "IntPoly":
        """``p(a x)``."""
        return IntPoly(tuple(x * a**i for i, x in enumerate(self.coeffs)))

    def __call__(self, x):
        acc = 0
        for a in reversed(self.coeffs):
            acc = acc * x + a
        return acc

    def to_json(self) -> list[str]:
        return [str(a) for a in self.coeffs]

    def __str__(self) -> str:
        parts = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            a = self.coeffs[i]
            if a == 0 and self.degree >= 0:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if mono and abs(a) == 1:
                coef = "-" if a < 0 else ""
            else:
                coef = str(a)
            parts.append(coef + mono)
        return " + ".join(parts).replace("+ -", "- ") or "0"


ONE = IntPoly((1,))
X = IntPoly((0, 1))


@lru_cache(maxsize=None)
def hermite(i: int) -> IntPoly:
    """Probabilist's Hermite polynomial ``He_i``."""
    if i < 0:
        raise ValueError("index must be non-negative")
    if i == 0:
        return ONE
    prev = hermite(i - 1)
    return prev.shift() - prev.derivative()


@lru_cache(maxsize=None)
def q_family(r: int) -> IntPoly:
    """``Q_r`` from ``Q_{r+1} = -4x Q_r + Q_r'``."""
    if r < 0:
        raise ValueError("index must be non-negative")
    if r == 0:
        return ONE
    prev = q_family(r - 1)
    return prev.shift().scale(-4) + prev.derivative()


def hermite_hat(a: int) -> IntPoly:
    """Tail basis ``Hhat_a = (-1)**a Q_a = 2**a He_a(2x)``."""
    return q_family(a).scale((-1) ** a)


@dataclass(frozen=True)
class HermiteTable:
    """Both integer families up to a common index."""

    he: tuple[IntPoly, ...]
    q: tuple[IntPoly, ...]

    def to_json(self) -> dict:
        return {
            "He": [p.to_json() for p in self.he],
            "Q": [p.to_json() for p in self.q],
        }


def hermite_table(n: int) -> HermiteTable:
    return HermiteTable(tuple(hermite(i) for i in range(n + 1)), tuple(q_family(i) for i in range(n + 1)))


@dataclass(frozen=True)
class IdentityReport:
    """Outcome of the He/Q identity comparison for indices ``0..n``.

    ``candidate_holds[i]`` tests ``Q_i(x) = (-1)**i He_i(4x)``;
    ``corrected_holds[i]`` tests ``Q_i(x) = (-2)**i He_i(2x)``.
    """

    n: int
    candidate_holds: tuple[bool, ...]
    corrected_holds: tuple[bool, ...]

    @property
    def candidate_failures(self) -> list[int]:
        return [i for i, ok in enumerate(self.candidate_holds) if not ok]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "candidate_identity": "Q_i(x) = (-1)^i He_i(4x)",
            "candidate_failures": self.candidate_failures,
            "corrected_identity": "Q_i(x) = (-2)^i He_i(2x)",
            "corrected_all_hold": all(self.corrected_holds),
        }


def he_identity_check(n: int = 20) -> IdentityReport:
    candidate, corrected = [], []
    for i in range(n + 1):
        q = q_family(i)
        candidate.append((q - hermite(i).dilate(4).scale((-1) ** i)).is_zero())
        corrected.append((q - hermite(i).dilate(2).scale((-2) ** i)).is_zero())
    return IdentityReport(n, tuple(candidate), tuple(corrected))


# -- Hankel constants -------------------------------------------------------
def gamma_hankel(s, precision: int = DEFAULT_PRECISION):
    """``G(s) = 1 / Gamma(s)``, the Hankel loop integral of ``e^t t^(-s)``.

    Entire in ``s``; zero at non-positive integers.
    """
    with mpmath.workdps(precision + 5):
        s = mpmath.mpf(s.numerator) / s.denominator if isinstance(s, Fraction) else mpmath.mpf(s)
        return +mpmath.rgamma(s)


def gamma_hankel_sine(s, precision: int = DEFAULT_PRECISION):
    """Same constant through ``sin(pi s) Gamma(1 - s) / pi``.

    At integers the removable singularity is replaced by its limit.
    """
    with mpmath.workdps(precision + 5):
        s = mpmath.mpf(s.numerator) / s.denominator if isinstance(s, Fraction) else mpmath.mpf(s)
        if s == int(s):
            return mpmath.mpf(0) if s <= 0 else mpmath.rgamma(s)
        return mpmath.sin(mpmath.pi * s) * mpmath.gamma(1 - s) / mpmath.pi


@dataclass(frozen=True)
class HankelRule:
    """Substitution ``t**(r/2) -> e^{-2x^2} / sqrt(pi) * constant * Hhat_index(x)``.

    Valid inside the Hankel integral
    ``(1 / 2 pi i) int e^t exp(-2 sqrt(2) x sqrt(t)) t**(r/2) dt``.
    ``constant = (2 sqrt 2)**(-(r+1))``, stored exactly as ``2**(-3(r+1)/2)``.
    """

    r: int
    index: int
    log2_constant: Fraction

    def constant(self, precision: int = DEFAULT_PRECISION):
        with mpmath.workdps(precision + 5):
            return mpmath.power(2, mpmath.mpf(self.log2_constant.numerator) / self.log2_constant.denominator)

    def basis(self) -> IntPoly:
        return hermite_hat(self.index)

    def evaluate(self, x, precision: int = DEFAULT_PRECISION):
        """Full value including ``e^{-2x^2}/sqrt(pi)``."""
        with mpmath.workdps(precision + 5):
            x = mpmath.mpf(x)
            return self.constant(precision) * self.basis()(x) * mpmath.exp(-2 * x * x) / mpmath.sqrt(mpmath.pi)


def t_power_to_hermite(r: int) -> HankelRule:
    if r < -1:
        raise ValueError("exponent index must be at least -1")
    return HankelRule(r, r + 1, Fraction(-3 * (r + 1), 2))


def hankel_integral_series(x, a: int, terms: int = 80, precision: int = DEFAULT_PRECISION):
    """Independent route for the Hankel rule: expand the exponential and
    integrate term by term with ``G``.

    Returns ``(1/2 pi i) int e^t exp(-2 sqrt2 x sqrt t) t**((a-1)/2) dt``.
    """
    with mpmath.workdps(precision + 15):
        x = mpmath.mpf(x)
        y = -2 * mpmath.sqrt(2) * x
        total = mpmath.mpf(0)
        for j in range(terms):
            total += y**j / mpmath.factorial(j) * gamma_hankel(Fraction(1 - a - j, 2), precision + 15)
        return +total


def composite_resummation(x, nonzero_terms: int = 30, precision: int = DEFAULT_PRECISION):
    """Term-by-term Hankel transform of ``exp(-2x sqrt(2t)) / sqrt(t)``, times ``sqrt(pi)``.

    Only even powers contribute (odd ones hit zeros of ``G``), so
    ``nonzero_terms`` even indices ``0, 2, ..., 2(nonzero_terms-1)``
    are summed.  The exact resummation is ``exp(-2 x^2)``.
    """
    with mpmath.workdps(precision + 15):
        x = mpmath.mpf(x)
        y = -2 * mpmath.sqrt(2) * x
        total = mpmath.mpf(0)
        for j in range(2 * nonzero_terms):
            total += y**j / mpmath.factorial(j) * gamma_hankel(Fraction(1 - j, 2), precision + 15)
        return total * mpmath.sqrt(mpmath.pi)
