"""Asymptotic expansions for bridge counts and bridge-height tails.

* :func:`saddle_expansion` and :func:`vn_asymptotic` give the number of
  unbounded bridges ``V_n = [u^0] P(u)^n``.
* :func:`rayleigh_tail` is the limit of ``P(max > x sigma sqrt(n))``.
* :func:`luka_expansion` produces the full ``n^(-1/2)`` expansion of the
  conditional tail for centered walks whose only down step is ``-1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath

from ._num import DEFAULT_PRECISION, dec, to_mp
from .errors import NotCenteredError, NotLukasiewiczError
from .hermite import hermite_hat
from .kernel import singularities
from .series import TruncatedSeries, luka_integrand
from .walk import JumpPolynomial, WalkProfile, period, require_reduced, structural_constants

DEFAULT_MAX_ORDER = 7


# -- unbounded bridges ------------------------------------------------------
@dataclass(frozen=True)
class SaddleExpansion:
    """``V_n ~ p * lambda0 * P(tau)**n / sqrt(2 pi n) * sum_m coefficients[m] / n**m``.

    ``p`` applies when ``p | n``; otherwise ``V_n = 0``.  ``coefficients[0]``
    is 1, so the normalized form ``V_n sigma_t sqrt(2 pi n) / (p P(tau)^n)``
    (``sigma_t = 1 / lambda0``) is ``sum_m coefficients[m] / n**m``.
    """

    profile: WalkProfile
    order: int
    coefficients: tuple
    cumulants: tuple

    @property
    def period(self) -> int:
        return self.profile.period

    @property
    def lambda0(self):
        return self.profile.lambda0

    @property
    def leading(self):
        """Leading constant ``lambda0``."""
        return self.profile.lambda0

    def to_json(self) -> dict:
        d = self.profile.precision
        return {
            "period": self.period,
            "lambda0": dec(self.lambda0, d),
            "p_tau": dec(self.profile.p_tau, d),
            "order": self.order,
            "coefficients": [dec(c, d) for c in self.coefficients],
        }


def tilted_cumulants(prof: WalkProfile, kmax: int):
    """Cumulants ``kappa_1..kappa_kmax`` of the law ``p_j tau^j / P(tau)``."""
    poly = prof.poly
    src = prof.tau_exact if prof.tau_exact is not None else prof.tau
    tau = to_mp(src)
    masses = [(j, to_mp(w) * tau**j / prof.p_tau) for j, w in poly.weights]
    mgf = TruncatedSeries(
        tuple(mpmath.fsum(m * mpmath.mpf(j) ** r for j, m in masses) / mpmath.factorial(r) for r in range(kmax + 1))
    )
    cgf = mgf.log()
    return tuple(cgf[k] * mpmath.factorial(k) for k in range(kmax + 1))


def saddle_expansion(poly: JumpPolynomial, order: int = 3, precision: int = DEFAULT_PRECISION) -> SaddleExpansion:
    """Gaussian-moment expansion of the local limit ``[u^0] P(u)^n``.

    With ``phi(theta) = P(tau e^{i theta}) / P(tau)`` and
    ``theta = y / (s sqrt(n))``, ``n log phi = -y^2/2 + sum_k kappa_k (iy)^k / (k! s^k n^(k/2-1))``.
    Expanding the exponential and integrating against the Gaussian
    (``E y^(2j) = (2j-1)!!``) yields the ``1/n`` coefficients.
    """
    require_reduced(poly)
    prof = structural_constants(poly, precision)
    with mpmath.workdps(precision + 15):
        kmax = 2 * order + 2
        kap = tilted_cumulants(prof, kmax)
        s = mpmath.sqrt(kap[2])
        emax = 2 * order
        # A = sum_{k>=3} c_k eps^(k-2) y^k with c_k = kappa_k i^k / (k! s^k)
        A = {}
        for k in range(3, kmax + 1):
            A[(k - 2, k)] = kap[k] * mpmath.mpc(0, 1) ** k / (mpmath.factorial(k) * s**k)
        E = {(0, 0): mpmath.mpc(1)}
        term = {(0, 0): mpmath.mpc(1)}
        for m in range(1, emax + 1):
            nxt = {}
            for (e1, y1), c1 in term.items():
                for (e2, y2), c2 in A.items():
                    if e1 + e2 <= emax:
                        key = (e1 + e2, y1 + y2)
                        nxt[key] = nxt.get(key, 0) + c1 * c2 / m
            term = nxt
            for key, v in term.items():
                E[key] = E.get(key, 0) + v
        coeffs = []
        for mm in range(order + 1):
            acc = mpmath.mpc(0)
            for (e, y), v in E.items():
                if e == 2 * mm and y % 2 == 0:
                    acc += v * mpmath.fac2(y - 1)
            coeffs.append(+acc.real)
        return SaddleExpansion(prof, order, tuple(coeffs), tuple(+k for k in kap))


def vn_asymptotic(poly: JumpPolynomial, n: int, order: int = 0, precision: int = DEFAULT_PRECISION):
    """Estimate ``V_n``; exactly 0 when the period does not divide ``n``."""
    if n < 1:
        raise ValueError("n must be positive")
    sx = saddle_expansion(poly, max(order, 0), precision)
    p = sx.period
    with mpmath.workdps(precision + 15):
        if n % p:
            return mpmath.mpf(0)
        corr = mpmath.fsum(sx.coefficients[m] / mpmath.mpf(n) ** m for m in range(order + 1))
        return +(p * sx.lambda0 * sx.profile.p_tau**n / mpmath.sqrt(2 * mpmath.pi * n) * corr)


# -- Rayleigh limit ---------------------------------------------------------
def rayleigh_exponent(prof: WalkProfile):
    """Constant ``1 / (rho tau^2)`` in ``exp(-2 x^2 / (rho tau^2))``."""
    return 1 / (prof.rho * prof.tau**2)


def rayleigh_tail(poly: JumpPolynomial, x, precision: int = DEFAULT_PRECISION):
    """Limit of ``P(max > x sigma sqrt(n))`` with ``sigma^2 = P''(tau)``."""
    if x <= 0:
        raise ValueError("x must be positive")
    require_reduced(poly)
    singularities(poly, precision)  # raises on repeated factors
    prof = structural_constants(poly, precision)
    with mpmath.workdps(precision + 10):
        x = to_mp(x)
        return +mpmath.exp(-2 * x * x * rayleigh_exponent(prof))


def rayleigh_ceiling(prof: WalkProfile, n: int, x) -> int:
    """Integer ceiling ``floor(x sigma sqrt(n))`` for the event ``max > x sigma sqrt(n)``."""
    with mpmath.workdps(prof.precision + 10):
        return int(mpmath.floor(to_mp(x) * prof.sigma * mpmath.sqrt(n)))


# -- Lukasiewicz tail expansion --------------------------------------------
def _hat_to_monomials(terms: dict) -> list:
    """Expand ``{(a, b): c}`` meaning ``c x^b Hhat_a(x)`` into monomial coefficients."""
    deg = max((a + b for a, b in terms), default=0)
    out = [mpmath.mpf(0)] * (deg + 1)
    for (a, b), cval in terms.items():
        for i, hc in enumerate(hermite_hat(a).coeffs):
            if hc:
                out[i + b] += cval * hc
    return out


@dataclass(frozen=True)
class TailExpansion:
    """Expansion of the conditional tail ``beta_n = P(max > x sigma sqrt n)``.

    ``beta_n ~ e^{-2x^2} sum_k n^(-k/2) terms_x[k](x)``.

    Attributes
    ----------
    terms_x : tuple of list
        Monomial coefficients (lowest degree first) of each order ``k``.
    terms_He : tuple of dict
        ``{(a, b): c}`` meaning ``c x^b Hhat_a(x)`` with
        ``Hhat_a = 2^a He_a(2x)``.
    numerator_x, numerator_He : tuple
        Same for the unnormalized tail ``b_n^{>h} sigma sqrt(2 pi n) e^{2x^2}``
        before division by the bridge-count expansion.
    meta : dict
        ``sigma``, ``xi`` and ``theta`` of the walk plus the saddle coefficients.
    """

    order: int
    terms_x: tuple
    terms_He: tuple
    numerator_x: tuple
    numerator_He: tuple
    meta: dict = field(default_factory=dict)
    precision: int = DEFAULT_PRECISION

    def term_value(self, k: int, x, numerator: bool = False):
        coeffs = (self.numerator_x if numerator else self.terms_x)[k]
        acc = mpmath.mpf(0)
        for cval in reversed(coeffs):
            acc = acc * x + cval
        return acc

    def term_value_He(self, k: int, x, numerator: bool = False):
        terms = (self.numerator_He if numerator else self.terms_He)[k]
        return mpmath.fsum(cval * x**b * hermite_hat(a)(x) for (a, b), cval in terms.items())

    def to_json(self) -> dict:
        d = self.precision

        def xs(rows):
            return [[[i, dec(cv, d)] for i, cv in enumerate(row) if cv != 0] for row in rows]

        def hs(rows):
            return [[[a, b, dec(cv, d)] for (a, b), cv in sorted(row.items())] for row in rows]

        return {
            "order": self.order,
            "basis": "Hhat_a(x) = 2^a He_a(2x)",
            "terms_x": xs(self.terms_x),
            "terms_He": hs(self.terms_He),
            "numerator_x": xs(self.numerator_x),
            "numerator_He": hs(self.numerator_He),
            "meta": {k: (dec(v, d) if not isinstance(v, (list, tuple)) else [dec(t, d) for t in v]) for k, v in self.meta.items()},
        }


def luka_expansion(
    poly: JumpPolynomial,
    order: int = DEFAULT_MAX_ORDER,
    precision: int = DEFAULT_PRECISION,
    max_order: int | None = DEFAULT_MAX_ORDER,
) -> TailExpansion:
    """Tail expansion through ``n^(-order/2)`` for a centered Lukasiewicz walk.

    Steps: expand ``u_1, v_1`` at ``z = 1``; build the integrand family; map
    ``t^((a-1)/2)`` to ``2^(-a/2) He_a(2x) e^{-2x^2}/sqrt(pi)`` by the Hankel
    rule; divide by the bridge-count expansion as a series in ``n^(-1/2)``.
    """
    if not poly.is_lukasiewicz:
        raise NotLukasiewiczError("tail expansion needs the only negative jump to be -1")
    if not poly.is_centered():
        raise NotCenteredError("tail expansion needs P(1) = 1 and P'(1) = 0")
    if order < 0:
        raise ValueError("order must be non-negative")
    if max_order is not None and order > max_order:
        raise ValueError(f"order {order} exceeds the configured cap {max_order}")
    require_reduced(poly)
    singularities(poly, precision)
    K = order
    with mpmath.workdps(precision + 15):
        integ = luka_integrand(poly, K, precision + 10)
        sigma = integ.sigma
        norm = sigma * mpmath.sqrt(2)
        num_he = [dict() for _ in range(K + 1)]
        for (k, a, b), phi in integ.family.items():
            cval = norm * phi * mpmath.power(2, -mpmath.mpf(3 * a) / 2)
            num_he[k][(a, b)] = num_he[k].get((a, b), 0) + cval
        sx = saddle_expansion(poly, K // 2, precision + 10)
        den = [mpmath.mpf(0)] * (K + 1)
        for m, cm in enumerate(sx.coefficients):
            if 2 * m <= K:
                den[2 * m] = cm
        inv = TruncatedSeries(tuple(den)).inverse().coeffs
        quo_he = [dict() for _ in range(K + 1)]
        for k in range(K + 1):
            for j in range(k + 1):
                if inv[j] == 0:
                    continue
                for key, cval in num_he[k - j].items():
                    quo_he[k][key] = quo_he[k].get(key, 0) + inv[j] * cval
        num_he = [{key: +v for key, v in row.items()} for row in num_he]
        quo_he = [{key: +v for key, v in row.items()} for row in quo_he]
        meta = {
            "sigma": sigma,
            "xi": to_mp(poly.derivative_at_one(3)),
            "theta": to_mp(poly.derivative_at_one(4)),
            "saddle_coefficients": list(sx.coefficients),
        }
        return TailExpansion(
            K,
            tuple(_hat_to_monomials(r) for r in quo_he),
            tuple(quo_he),
            tuple(_hat_to_monomials(r) for r in num_he),
            tuple(num_he),
            meta,
            precision,
        )


def evaluate_tail(exp: TailExpansion, n: int, x, order: int | None = None):
    """``e^{-2x^2} sum_{k <= order} n^(-k/2) terms_x[k](x)``."""
    if n < 1:
        raise ValueError("n must be positive")
    K = exp.order if order is None else min(order, exp.order)
    with mpmath.workdps(exp.precision + 10):
        x = to_mp(x)
        eps = 1 / mpmath.sqrt(n)
        total = mpmath.fsum(exp.term_value(k, x) * eps**k for k in range(K + 1))
        return +(mpmath.exp(-2 * x * x) * total)


# -- Hermite skeleton -------------------------------------------------------
def predicted_skeleton(k: int) -> set[tuple[int, int]]:
    """Allowed ``(He index, x degree)`` pairs in the unnormalized order-``k`` term.

    The integrand factors contribute ``eps^j s^j`` (prefactor),
    ``x eps^(i-1) s^i`` for odd ``i >= 3`` and ``eps^(2j-2) s^(2j)`` for
    ``j >= 2``, so a term of order ``k`` with ``b`` powers of ``x`` and ``m``
    factors of the last kind has ``s``-degree ``k + b + 2m`` with
    ``b + m <= k // 2``.
    """
    return {(k + b + 2 * m, b) for b in range(k // 2 + 1) for m in range(k // 2 + 1 - b)}


@dataclass(frozen=True)
class SkeletonCheck:
    k: int
    ok: bool
    observed: tuple
    predicted: tuple

    def to_json(self) -> dict:
        return {"k": self.k, "ok": self.ok, "observed": [list(t) for t in self.observed], "predicted": [list(t) for t in self.predicted]}


def observed_support(exp: TailExpansion, k: int, rel_tol=1e-30) -> set[tuple[int, int]]:
    row = exp.numerator_He[k]
    scale = max((abs(v) for v in row.values()), default=0)
    return {key for key, v in row.items() if abs(v) > rel_tol * max(scale, 1)}


def hermite_skeleton_check(exp: TailExpansion, k: int) -> SkeletonCheck:
    """Check that the He-support of the unnormalized order-``k`` term lies in the skeleton."""
    if not 0 <= k <= exp.order:
        raise ValueError(f"k must lie in [0, {exp.order}]")
    obs = observed_support(exp, k)
    pred = predicted_skeleton(k)
    return SkeletonCheck(k, obs <= pred, tuple(sorted(obs)), tuple(sorted(pred)))
