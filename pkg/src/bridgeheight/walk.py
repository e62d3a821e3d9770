"""Weighted jump sets and their structural constants.

A walk is described by its characteristic Laurent polynomial
``P(u) = sum_j p_j u**j`` where ``p_j > 0`` is the weight of jump ``j``.
``c`` is the largest downward jump magnitude and ``d`` the largest
upward jump.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Iterable, Mapping

import mpmath

from ._num import DEFAULT_PRECISION, dec, mpf_to_fraction, to_mp
from .errors import (
    IrrationalCenterError,
    NotReducedError,
    ParseError,
    PrecisionError,
    RepeatedFactorError,
)

_PAIR = re.compile(r"^\s*([+-]?\d+)\s*:\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


def _falling(j: int, k: int) -> int:
    """Falling factorial ``j (j-1) ... (j-k+1)``."""
    out = 1
    for i in range(k):
        out *= j - i
    return out


@dataclass(frozen=True)
class JumpPolynomial:
    """Characteristic Laurent polynomial of a weighted jump set.

    Parameters
    ----------
    weights : tuple of (int, Fraction)
        ``(jump, weight)`` pairs sorted by jump, all weights positive.
    """

    weights: tuple[tuple[int, Fraction], ...]

    def __post_init__(self):
        if not self.weights:
            raise ParseError("empty jump set")
        jumps = [j for j, _ in self.weights]
        if len(set(jumps)) != len(jumps):
            raise ParseError("duplicate jump")
        if list(jumps) != sorted(jumps):
            object.__setattr__(self, "weights", tuple(sorted(self.weights)))
        for j, w in self.weights:
            if not isinstance(j, int) or not isinstance(w, Fraction):
                raise ParseError("jumps must be int and weights Fraction")
            if w <= 0:
                raise ParseError(f"weight of jump {j} must be positive")
        if self.weights[0][0] >= 0:
            raise ParseError("walk needs at least one negative jump")
        if self.weights[-1][0] <= 0:
            raise ParseError("walk needs at least one positive jump")

    @classmethod
    def from_mapping(cls, jumps: Mapping[int, object]) -> "JumpPolynomial":
        """Build from ``{jump: weight}``; weights are coerced to Fraction."""
        return cls(tuple(sorted((int(j), Fraction(w)) for j, w in jumps.items())))

    # -- basic shape -------------------------------------------------------
    @property
    def jumps(self) -> dict[int, Fraction]:
        return dict(self.weights)

    @property
    def c(self) -> int:
        """Largest downward jump magnitude."""
        return -self.weights[0][0]

    @property
    def d(self) -> int:
        """Largest upward jump."""
        return self.weights[-1][0]

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(j for j, _ in self.weights)

    @property
    def is_lukasiewicz(self) -> bool:
        return self.c == 1

    def total_weight(self) -> Fraction:
        """``P(1)``."""
        return sum((w for _, w in self.weights), Fraction(0))

    def drift(self) -> Fraction:
        """``P'(1)``."""
        return sum((j * w for j, w in self.weights), Fraction(0))

    def is_probabilistic(self) -> bool:
        return self.total_weight() == 1

    def is_centered(self) -> bool:
        """Exact test of ``P(1) = 1`` and ``P'(1) = 0``."""
        return self.is_probabilistic() and self.drift() == 0

    def scaled(self, factor) -> "JumpPolynomial":
        """Multiply every weight by ``factor``."""
        factor = Fraction(factor)
        return JumpPolynomial(tuple((j, w * factor) for j, w in self.weights))

    # -- evaluation --------------------------------------------------------
    def derivative_at_one(self, k: int) -> Fraction:
        """Exact ``P^(k)(1)``."""
        return sum((_falling(j, k) * w for j, w in self.weights), Fraction(0))

    def taylor_at_one(self, k: int) -> Fraction:
        """Exact ``P^(k)(1) / k!``."""
        return self.derivative_at_one(k) / math.factorial(k)

    def evaluate(self, u, k: int = 0):
        """Value of the ``k``-th derivative of ``P`` at ``u``.

        Exact for ``Fraction``/``int`` input, mpmath arithmetic for mpmath
        input, and double precision for ``float``/``complex``.
        """
        terms = [(j, _falling(j, k) * w) for j, w in self.weights if _falling(j, k)]
        if isinstance(u, (Fraction, int)) and not isinstance(u, bool):
            u = Fraction(u)
            return sum((cw * u ** (j - k) for j, cw in terms), Fraction(0))
        if isinstance(u, (mpmath.mpf, mpmath.mpc)):
            return mpmath.fsum(to_mp(cw) * u ** (j - k) for j, cw in terms)
        return sum(float(cw) * u ** (j - k) for j, cw in terms)

    __call__ = evaluate

    def kernel_coefficients(self, z) -> list:
        """Coefficients, lowest degree first, of ``u^c - z u^c P(u)``."""
        n = self.c + self.d
        coeffs = [0] * (n + 1)
        coeffs[self.c] = 1
        for j, w in self.weights:
            coeffs[j + self.c] = coeffs[j + self.c] - z * (
                to_mp(w) if isinstance(z, (mpmath.mpf, mpmath.mpc)) else float(w)
            )
        return coeffs

    def derivative_polynomial(self) -> list[Fraction]:
        """Coefficients, lowest degree first, of ``u^(c+1) P'(u)``."""
        coeffs = [Fraction(0)] * (self.c + self.d + 1)
        for j, w in self.weights:
            coeffs[j + self.c] += j * w
        return coeffs

    def text(self) -> str:
        """Canonical ``jump:weight`` rendering (inverse of parsing)."""
        return ",".join(f"{j}:{w}" for j, w in self.weights)

    def __str__(self) -> str:
        return self.text()


def parse_polynomial(text: str) -> JumpPolynomial:
    """Parse ``jump:weight(,jump:weight)*``.

    Examples
    --------
    >>> parse_polynomial("-1:1/2,1:1/2").c
    1
    """
    if not isinstance(text, str) or not text.strip():
        raise ParseError("empty jump-weight text")
    out: dict[int, Fraction] = {}
    for item in text.split(","):
        m = _PAIR.match(item)
        if m is None:
            raise ParseError(f"malformed pair {item!r}")
        jump, num, den = int(m.group(1)), int(m.group(2)), m.group(3)
        den = int(den) if den is not None else 1
        if den == 0:
            raise ParseError(f"zero denominator in {item!r}")
        if jump in out:
            raise ParseError(f"duplicate jump {jump}")
        weight = Fraction(num, den)
        if weight <= 0:
            raise ParseError(f"weight of jump {jump} must be positive")
        out[jump] = weight
    return JumpPolynomial(tuple(sorted(out.items())))


def period(poly: JumpPolynomial) -> int:
    """Gcd of the exponent gaps of ``u^c P(u)``; 1 means aperiodic."""
    exps = [j + poly.c for j in poly.support]
    return reduce(math.gcd, (e - exps[0] for e in exps[1:]), 0)


def reduced_gcd(poly: JumpPolynomial) -> int:
    """Gcd of the support jumps; 1 means the walk is reduced."""
    return reduce(math.gcd, (abs(j) for j in poly.support), 0)


def require_reduced(poly: JumpPolynomial) -> None:
    g = reduced_gcd(poly)
    if g != 1:
        raise NotReducedError(f"jump gcd is {g}; divide the jumps by it first")


# -- tau --------------------------------------------------------------------
def _dprime_sign(poly: JumpPolynomial, u: Fraction) -> int:
    val = sum((j * w * u ** (j + poly.c) for j, w in poly.weights), Fraction(0))
    return (val > 0) - (val < 0)


def sign_changes_on_grid(poly: JumpPolynomial, points: int = 241) -> int:
    """Number of sign changes of ``P'`` on a log grid over (1e-6, 1e6)."""
    signs = []
    for i in range(points):
        u = Fraction(10.0 ** (-6 + 12 * i / (points - 1)))
        s = _dprime_sign(poly, u)
        if s != 0:
            signs.append(s)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _bracket_tau(poly: JumpPolynomial) -> tuple[Fraction, Fraction]:
    # u^(c+1) P'(u) is -c p_{-c} at 0 and grows like d p_d u^(c+d).
    lo, hi = Fraction(1), Fraction(1)
    while _dprime_sign(poly, lo) > 0:
        lo /= 2
    while _dprime_sign(poly, hi) < 0:
        hi *= 2
    return lo, hi


def _find_tau(poly: JumpPolynomial, precision: int, max_iter: int = 200):
    """Return ``(tau_mpf, tau_exact_or_None)``."""
    lo, hi = _bracket_tau(poly)
    if _dprime_sign(poly, lo) == 0:
        return to_mp(lo), lo
    if _dprime_sign(poly, hi) == 0:
        return to_mp(hi), hi
    # bisection to about 10 digits
    while (hi - lo) > Fraction(1, 10**10) * hi:
        mid = (lo + hi) / 2
        s = _dprime_sign(poly, mid)
        if s == 0:
            return to_mp(mid), mid
        if s < 0:
            lo = mid
        else:
            hi = mid
    guess = (lo + hi) / 2
    cand = guess.limit_denominator(10**6)
    if lo <= cand <= hi and _dprime_sign(poly, cand) == 0:
        return to_mp(cand), cand
    u = to_mp(guess)
    tol = mpmath.mpf(10) ** (-precision - 3)
    for _ in range(max_iter):
        step = poly.evaluate(u, 1) / poly.evaluate(u, 2)
        u -= step
        if abs(step) <= tol * abs(u):
            if not (to_mp(lo) * (1 - tol) <= u <= to_mp(hi) * (1 + tol)):
                raise PrecisionError("Newton polish left the bracket")
            return u, None
    raise PrecisionError(f"tau not resolved to {precision} digits in {max_iter} steps")


@dataclass(frozen=True)
class WalkProfile:
    """Derived constants of a walk.

    Real constants are mpmath numbers computed at ``precision`` digits.
    ``tau_exact`` holds tau as a Fraction when it is rational.
    """

    poly: JumpPolynomial
    precision: int
    period: int
    reduced_gcd: int
    drift: Fraction
    probabilistic: bool
    tau: object
    tau_exact: Fraction | None
    p_tau: object
    rho: object
    sigma2_tau: object
    lambda0: object
    moments_at_1: tuple[Fraction, Fraction, Fraction] | None = field(default=None)

    @property
    def sigma(self):
        """``sqrt(P''(tau))``."""
        with mpmath.workdps(self.precision + 10):
            return mpmath.sqrt(self.sigma2_tau)

    def to_json(self) -> dict:
        digits = self.precision
        out = {
            "polynomial": self.poly.text(),
            "c": self.poly.c,
            "d": self.poly.d,
            "period": self.period,
            "reduced_gcd": self.reduced_gcd,
            "drift": str(self.drift),
            "probabilistic": self.probabilistic,
            "tau": dec(self.tau, digits),
            "tau_exact": None if self.tau_exact is None else str(self.tau_exact),
            "p_tau": dec(self.p_tau, digits),
            "rho": dec(self.rho, digits),
            "sigma2_tau": dec(self.sigma2_tau, digits),
            "lambda0": dec(self.lambda0, digits),
            "precision": digits,
        }
        if self.moments_at_1 is not None:
            s2, xi, th = self.moments_at_1
            out["moments_at_1"] = {"sigma2": str(s2), "xi": str(xi), "theta": str(th)}
        else:
            out["moments_at_1"] = None
        return out


def structural_constants(poly: JumpPolynomial, precision: int = DEFAULT_PRECISION) -> WalkProfile:
    """Compute period, gcd, drift, tau, rho, P''(tau) and lambda0.

    Parameters
    ----------
    poly : JumpPolynomial
    precision : int
        Significant decimal digits for the real constants.
    """
    with mpmath.workdps(precision + 10):
        tau, tau_exact = _find_tau(poly, precision)
        src = tau_exact if tau_exact is not None else tau
        p_tau = to_mp(poly.evaluate(src)) if tau_exact is not None else poly.evaluate(tau)
        p2 = to_mp(poly.evaluate(src, 2)) if tau_exact is not None else poly.evaluate(tau, 2)
        if p2 <= 0:
            raise RepeatedFactorError("P''(tau) is not positive")
        lam = mpmath.sqrt(p_tau / p2) / tau
        moments = None
        if poly.is_probabilistic():
            moments = tuple(poly.derivative_at_one(k) for k in (2, 3, 4))
        return WalkProfile(
            poly=poly,
            precision=precision,
            period=period(poly),
            reduced_gcd=reduced_gcd(poly),
            drift=poly.drift(),
            probabilistic=poly.is_probabilistic(),
            tau=+tau,
            tau_exact=tau_exact,
            p_tau=+p_tau,
            rho=1 / p_tau,
            sigma2_tau=+p2,
            lambda0=+lam,
            moments_at_1=moments,
        )


def center(poly: JumpPolynomial, mode: str = "auto", precision: int = DEFAULT_PRECISION) -> JumpPolynomial:
    """Shift the mean: ``p_j -> p_j tau**j / P(tau)``.

    Parameters
    ----------
    mode : {"auto", "exact", "float"}
        ``exact`` requires a rational tau and gives an exactly centered walk.
        ``float`` rounds the reweighted masses to binary fractions at
        ``precision`` digits and renormalizes them to sum to one.
        ``auto`` is exact when possible.
    """
    if mode not in ("auto", "exact", "float"):
        raise ValueError(f"unknown centering mode {mode!r}")
    prof = structural_constants(poly, precision)
    if prof.tau_exact is not None and mode in ("auto", "exact"):
        tau = prof.tau_exact
        total = poly.evaluate(tau)
        return JumpPolynomial(tuple((j, w * tau**j / total) for j, w in poly.weights))
    if mode == "exact":
        raise IrrationalCenterError("tau is irrational; use float centering")
    with mpmath.workdps(precision + 10):
        raw = [(j, mpf_to_fraction(to_mp(w) * prof.tau**j * prof.rho)) for j, w in poly.weights]
    total = sum((w for _, w in raw), Fraction(0))
    return JumpPolynomial(tuple((j, w / total) for j, w in raw))


# Named walks used throughout the test-suite and documentation.
NAMED_WALKS: dict[str, str] = {
    "dyck": "-1:1/2,1:1/2",
    "dyck1": "-1:1,1:1",
    "motzkin": "-1:1/3,0:1/3,1:1/3",
    "motzkin1": "-1:1,0:1,1:1",
    "duchon": "-3:1,2:1",
    "negcoef": "-3:1/8,-2:1/6,1:17/24",
    "stokes": "-2:1,-1:3,1:1",
    "luka_sq": "-1:1/3,0:1/2,2:1/6",
    "fig1": "-1:1,3:1",
    "period6": "-3:1,3:1,9:1",
}


def named(name: str) -> JumpPolynomial:
    """Parse one of :data:`NAMED_WALKS`."""
    return parse_polynomial(NAMED_WALKS[name])


def iter_walks(texts: Iterable[str]) -> list[JumpPolynomial]:
    return [parse_polynomial(t) for t in texts]


def random_centered_lukasiewicz(rng, max_up: int = 4, max_weight: int = 9) -> JumpPolynomial:
    """Random centered walk whose only down step is -1.

    Up-jump weights are random positive rationals; the down weight is set so
    the drift vanishes, then everything is normalized to total mass one.

    Parameters
    ----------
    rng : random.Random
        Source of randomness (seeded by the caller for reproducibility).
    """
    d = rng.randint(1, max_up)
    ups = {j: Fraction(rng.randint(1, max_weight), rng.randint(1, max_weight)) for j in range(1, d + 1)}
    # thin out interior jumps but always keep the top one
    for j in range(1, d):
        if rng.random() < 0.4:
            del ups[j]
    if rng.random() < 0.5:
        ups[0] = Fraction(rng.randint(1, max_weight), rng.randint(1, max_weight))
    down = sum((j * w for j, w in ups.items()), Fraction(0))
    weights = dict(ups)
    weights[-1] = down
    total = sum(weights.values(), Fraction(0))
    return JumpPolynomial(tuple(sorted((j, w / total) for j, w in weights.items())))
