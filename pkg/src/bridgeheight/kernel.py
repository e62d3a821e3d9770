"""Roots of the kernel equation ``1 - z P(u) = 0`` and their analysis.

For ``z != 0`` the kernel is the degree ``c + d`` polynomial
``u^c - z u^c P(u)``.  Its ``c`` small roots tend to 0 and its ``d`` large
roots tend to infinity as ``z -> 0``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from . import kernels
from ._num import DEFAULT_PRECISION, cdec, dec, to_mp
from .errors import (
    BranchCollisionError,
    BranchPointError,
    DegenerateSplitError,
    RepeatedFactorError,
    RootFindingError,
)
from .walk import JumpPolynomial, period, structural_constants

SPLIT_GAP = 1e-6
RESIDUAL_TOL = 1e-12


def _pval(poly: JumpPolynomial, u: complex, k: int = 0) -> complex:
    return complex(poly.evaluate(complex(u), k))


def root_derivative(poly: JumpPolynomial, z: complex, u: complex) -> complex:
    """``du/dz = -1 / (z**2 P'(u))`` along a root of ``1 - z P(u)``."""
    dp = _pval(poly, u, 1)
    if abs(dp) < 1e-14 * max(1.0, abs(_pval(poly, u))):
        raise BranchPointError(f"P'(u) vanishes at u={u} (z={z} is a branch point)")
    return -1.0 / (z * z * dp)


@dataclass(frozen=True)
class RootSystem:
    """All kernel roots at one argument ``z``.

    ``small`` is ordered by decreasing modulus (``small[0]`` is ``u_1`` when
    it dominates) and ``large`` by increasing modulus (``large[0]`` is ``v_1``).
    """

    z: complex
    small: tuple[complex, ...]
    large: tuple[complex, ...]
    residual: float
    degenerate: bool
    classification: str = "by-modulus"

    @property
    def roots(self) -> tuple[complex, ...]:
        return self.small + self.large

    def to_json(self, digits: int = 17) -> dict:
        return {
            "z": cdec(self.z, digits),
            "small": [cdec(u, digits) for u in self.small],
            "large": [cdec(v, digits) for v in self.large],
            "residual": dec(self.residual, 6),
            "degenerate": self.degenerate,
            "classification": self.classification,
        }


def _companion_roots(coeffs: list[complex]) -> np.ndarray:
    # numpy.roots builds the companion matrix and takes its eigenvalues
    return np.roots(np.array(coeffs[::-1], dtype=np.complex128))


def _all_roots(poly: JumpPolynomial, z: complex, max_iter: int = 200) -> tuple[np.ndarray, float]:
    coeffs = [complex(a) for a in poly.kernel_coefficients(complex(z))]
    est = _companion_roots(coeffs)
    roots, _, _ = kernels.aberth_polish(coeffs, est, 1e-15, max_iter)
    roots = np.asarray(roots)
    resid = max(abs(1 - z * _pval(poly, u)) for u in roots)
    scale = max(abs(a) for a in coeffs)
    if not np.all(np.isfinite(roots)) or resid > 1e-9 * max(1.0, scale):
        raise RootFindingError(f"kernel roots at z={z} not resolved (residual {resid:.3g})")
    return roots, resid


def roots_at(poly: JumpPolynomial, z: complex) -> RootSystem:
    """Solve the kernel at ``z`` and split the roots by modulus.

    Examples
    --------
    >>> from bridgeheight.walk import parse_polynomial
    >>> rs = roots_at(parse_polynomial("-1:1/2,1:1/2"), 0.5)
    >>> round(rs.small[0].real, 7), round(rs.large[0].real, 7)
    (0.2679492, 3.7320508)
    """
    z = complex(z)
    if z == 0:
        raise ValueError("z must be non-zero")
    roots, resid = _all_roots(poly, z)
    order = sorted(roots, key=abs)
    c = poly.c
    small = tuple(complex(u) for u in sorted(order[:c], key=abs, reverse=True))
    large = tuple(complex(v) for v in order[c:])
    gap = abs(abs(order[c]) - abs(order[c - 1])) / max(abs(order[c]), 1e-300)
    return RootSystem(z, small, large, float(resid), bool(gap < SPLIT_GAP))


def symmetric_function_check(poly: JumpPolynomial, rs: RootSystem) -> float:
    """Relative mismatch of the root sum and product against coefficient ratios."""
    coeffs = [complex(a) for a in poly.kernel_coefficients(rs.z)]
    lead = coeffs[-1]
    n = len(coeffs) - 1
    want_sum = -coeffs[-2] / lead
    want_prod = (-1) ** n * coeffs[0] / lead
    got_sum = sum(rs.roots)
    got_prod = np.prod(np.array(rs.roots))
    e1 = abs(got_sum - want_sum) / max(1.0, abs(want_sum))
    e2 = abs(got_prod - want_prod) / max(1e-300, abs(want_prod))
    return float(max(e1, e2))


# -- branch tracking --------------------------------------------------------
def _match(prev: np.ndarray, new: np.ndarray) -> tuple[np.ndarray, float]:
    """Greedy nearest assignment; returns the permuted roots and an ambiguity ratio.

    The ratio compares each pair's distance with the distance to the second
    closest candidate; values near 1 mean the step is too coarse.
    """
    n = len(prev)
    dist = np.abs(prev[:, None] - new[None, :])
    out = np.empty(n, dtype=np.complex128)
    used = set()
    worst = 0.0
    for idx in np.argsort(dist.min(axis=1)):
        cand = [j for j in np.argsort(dist[idx]) if j not in used]
        j = cand[0]
        used.add(j)
        out[idx] = new[j]
        if len(cand) > 1:
            second = dist[idx, cand[1]]
            worst = max(worst, dist[idx, j] / max(second, 1e-300))
    return out, worst


def track_roots(poly: JumpPolynomial, path, start=None, max_depth: int = 12, collision_tol: float = 1e-9):
    """Continue all kernel roots along the polyline ``path``.

    Steps whose nearest-match assignment is ambiguous are subdivided
    adaptively.  Returns an array of shape ``(len(path), c + d)``; column
    order follows ``start`` (default: small then large at ``path[0]``).
    """
    path = [complex(z) for z in path]
    if start is None:
        start = np.array(roots_at(poly, path[0]).roots)
    cur = np.array(start, dtype=np.complex128)
    out = [cur.copy()]

    def step(z0, z1, cur, depth):
        new, _ = _all_roots(poly, z1)
        sep = min((abs(a - b) for i, a in enumerate(new) for b in new[i + 1:]), default=math.inf)
        if sep < collision_tol:
            raise BranchCollisionError(f"roots collide near z={z1}")
        matched, amb = _match(cur, new)
        if amb > 0.3:
            if depth >= max_depth:
                raise BranchCollisionError(f"branch assignment ambiguous near z={z1}")
            mid = (z0 + z1) / 2
            cur = step(z0, mid, cur, depth + 1)
            return step(mid, z1, cur, depth + 1)
        return matched

    for z0, z1 in zip(path, path[1:]):
        if z0 == z1:
            out.append(cur.copy())
            continue
        cur = step(z0, z1, cur, 0)
        out.append(cur.copy())
    return np.array(out)


def track_branch(poly: JumpPolynomial, z_start: complex, z_end: complex, steps: int, branch: int = 0) -> list[complex]:
    """Values of one branch along the segment from ``z_start`` to ``z_end``.

    ``branch`` indexes ``roots_at(poly, z_start).roots`` (0 is ``u_1``).
    """
    if steps < 1:
        raise ValueError("steps must be positive")
    z_start, z_end = complex(z_start), complex(z_end)
    path = [z_start + (z_end - z_start) * k / steps for k in range(steps + 1)]
    if z_start == z_end:
        return [roots_at(poly, z_start).roots[branch]] * (steps + 1)
    vals = track_roots(poly, path)
    return [complex(v) for v in vals[:, branch]]


def track_circle(poly: JumpPolynomial, r: float, samples: int, turns: float = 1.0):
    """Track all roots around ``|z| = r`` starting from the real point ``z = r``.

    Returns ``(angles, values)`` with ``values[k]`` ordered as
    ``roots_at(poly, r).roots``.
    """
    angles = [2 * math.pi * turns * k / samples for k in range(samples + 1)]
    path = [r * cmath.exp(1j * a) for a in angles]
    return angles, track_roots(poly, path)


# -- singularities ----------------------------------------------------------
def _poly_gcd_degree(a: list[Fraction], b: list[Fraction]) -> int:
    """Degree of gcd(a, b) over the rationals (coefficients lowest first)."""

    def trim(p):
        p = list(p)
        while p and p[-1] == 0:
            p.pop()
        return p

    a, b = trim(a), trim(b)
    while b:
        # a mod b
        a = list(a)
        while len(a) >= len(b):
            f = a[-1] / b[-1]
            shift = len(a) - len(b)
            for i, bc in enumerate(b):
                a[i + shift] -= f * bc
            a = trim(a)
            if not a:
                break
        a, b = b, a
    return len(a) - 1


@dataclass(frozen=True)
class SingularitySet:
    """Roots ``upsilon_k`` of ``P'`` paired with ``zeta_k = 1 / P(upsilon_k)``."""

    upsilon: tuple
    zeta: tuple
    rho_index: int
    precision: int

    def to_json(self) -> dict:
        d = self.precision
        return {
            "upsilon": [cdec(u, d) for u in self.upsilon],
            "zeta": [cdec(z, d) for z in self.zeta],
            "rho_index": self.rho_index,
        }


def singularities(poly: JumpPolynomial, precision: int = DEFAULT_PRECISION) -> SingularitySet:
    """All roots of ``u^(c+1) P'(u)`` with their critical values.

    Raises
    ------
    RepeatedFactorError
        When ``P'`` has a repeated root (the simple-singularity hypothesis fails).
    """
    coeffs = poly.derivative_polynomial()
    deriv = [i * coeffs[i] for i in range(1, len(coeffs))]
    if _poly_gcd_degree(coeffs, deriv) > 0:
        raise RepeatedFactorError("P' has a repeated root; singularities are not simple")
    with mpmath.workdps(precision + 20):
        mp_coeffs = [to_mp(a) for a in reversed(coeffs)]
        ups = mpmath.polyroots(mp_coeffs, maxsteps=200, extraprec=4 * precision)
        tol = mpmath.mpf(10) ** (-precision // 2)
        out_u, out_z = [], []
        for u in ups:
            if abs(poly.evaluate(mpmath.mpc(u), 2)) < tol:
                raise RepeatedFactorError(f"P'' vanishes at {u}")
            out_u.append(+mpmath.mpc(u))
            out_z.append(1 / poly.evaluate(mpmath.mpc(u)))
        order = sorted(range(len(out_u)), key=lambda i: (abs(out_z[i]), float(mpmath.arg(out_z[i]) % (2 * mpmath.pi))))
        out_u = [out_u[i] for i in order]
        out_z = [out_z[i] for i in order]
        tau = structural_constants(poly, precision).tau
        rho_index = min(range(len(out_u)), key=lambda i: abs(out_u[i] - tau))
        return SingularitySet(tuple(out_u), tuple(out_z), rho_index, precision)


# -- domination -------------------------------------------------------------
@dataclass
class DominationReport:
    """Strict modulus chain ``|u_i| < |u_1| < |v_1| < |v_j|`` over a grid."""

    grid: list = field(default_factory=list)
    chain_ok: list = field(default_factory=list)
    A_hat: float = 0.0
    B_hat: float = 0.0
    violations: list = field(default_factory=list)
    skipped: list = field(default_factory=list)

    @property
    def all_ok(self) -> bool:
        return bool(self.chain_ok) and all(self.chain_ok)

    def to_json(self) -> dict:
        return {
            "samples": len(self.grid),
            "chain_holds": self.all_ok,
            "A_hat": dec(self.A_hat, 17),
            "B_hat": dec(self.B_hat, 17),
            "violations": [cdec(z, 17) if isinstance(z, complex) else dec(z, 17) for z in self.violations],
            "skipped": [cdec(z, 17) for z in self.skipped],
        }


def _chain(rs: RootSystem, real_axis: bool) -> tuple[bool, float, float]:
    u1, v1 = rs.small[0], rs.large[0]
    ok = abs(u1) < abs(v1)
    if real_axis:
        tol = 1e-9 * max(1.0, abs(u1))
        ok = ok and abs(u1.imag) < tol and u1.real > 0 and abs(v1.imag) < 1e-9 * abs(v1) and v1.real > 0
    A = max((abs(u) / abs(u1) for u in rs.small[1:]), default=0.0)
    B = max((abs(v1) / abs(v) for v in rs.large[1:]), default=0.0)
    ok = ok and A < 1 and B < 1
    return ok, A, B


def _scan(poly, zs, real_axis: bool) -> DominationReport:
    rep = DominationReport()
    for z in zs:
        try:
            rs = roots_at(poly, z)
        except (RootFindingError, DegenerateSplitError):
            rep.skipped.append(complex(z))
            continue
        if rs.degenerate:
            rep.skipped.append(complex(z))
            continue
        ok, A, B = _chain(rs, real_axis)
        rep.grid.append(z)
        rep.chain_ok.append(ok)
        rep.A_hat = max(rep.A_hat, A)
        rep.B_hat = max(rep.B_hat, B)
        if not ok:
            rep.violations.append(z)
    return rep


def verify_domination(poly: JumpPolynomial, samples: int = 200) -> DominationReport:
    """Check the chain on ``samples`` equally spaced real points of ``(0, rho)``."""
    rho = float(structural_constants(poly).rho)
    zs = [rho * k / (samples + 1) for k in range(1, samples + 1)]
    return _scan(poly, zs, real_axis=True)


def verify_domination_ray(poly: JumpPolynomial, ell: int, samples: int = 200) -> DominationReport:
    """Chain along ``z = x kappa**c`` with ``kappa = exp(2 pi i ell / p)``, ``x`` in ``(0, rho)``."""
    p = period(poly)
    if not 0 <= ell < p:
        raise ValueError(f"ell must lie in [0, {p})")
    rho = float(structural_constants(poly).rho)
    rot = cmath.exp(2j * math.pi * ell * poly.c / p)
    zs = [rot * rho * k / (samples + 1) for k in range(1, samples + 1)]
    if ell == 0:
        zs = [z.real for z in zs]
    return _scan(poly, zs, real_axis=(ell == 0))


@dataclass
class CircleReport(DominationReport):
    """Circle scan with branch-tracked dominant root."""

    angles: list = field(default_factory=list)
    tracked_moduli: list = field(default_factory=list)
    arcs: list = field(default_factory=list)

    def to_json(self) -> dict:
        out = super().to_json()
        out["violations"] = [dec(a, 17) for a in self.violations]
        out["arcs"] = [[dec(a, 17), dec(b, 17)] for a, b in self.arcs]
        return out


def domination_on_circle(poly: JumpPolynomial, r: float, samples: int = 720) -> CircleReport:
    """Track ``u_1`` from the real point ``z = r`` around ``|z| = r``.

    A violation is an angle where the tracked ``u_1`` is not of strictly
    largest modulus among the small roots.  Violating angles are also
    grouped into maximal arcs.
    """
    rep = CircleReport()
    c = poly.c
    angles, vals = track_circle(poly, r, samples)
    for a, row in zip(angles[:-1], vals[:-1]):
        small = row[:c]
        u1 = abs(small[0])
        others = [abs(u) for u in small[1:]]
        ok = all(u < u1 for u in others)
        rep.angles.append(a)
        rep.grid.append(r * cmath.exp(1j * a))
        rep.chain_ok.append(ok)
        rep.tracked_moduli.append([float(abs(u)) for u in small])
        if others:
            rep.A_hat = max(rep.A_hat, max(others) / u1)
        if not ok:
            rep.violations.append(a)
    start = None
    for a, ok in zip(rep.angles, rep.chain_ok):
        if not ok and start is None:
            start = a
        if ok and start is not None:
            rep.arcs.append((start, prev))
            start = None
        prev = a
    if start is not None:
        rep.arcs.append((start, rep.angles[-1]))
    return rep


# -- periodic structure -----------------------------------------------------
def verify_rotation_identities(poly: JumpPolynomial, k_max: int = 4, precision: int = DEFAULT_PRECISION):
    """Max of ``|P^(k)(kappa tau) - kappa^-(c+k) P^(k)(tau)|`` over ``ell < p``, ``k <= k_max``."""
    p = period(poly)
    prof = structural_constants(poly, precision)
    worst = mpmath.mpf(0)
    with mpmath.workdps(precision + 10):
        tau = mpmath.mpf(prof.tau)
        for ell in range(p):
            kappa = mpmath.expjpi(mpmath.mpf(2 * ell) / p)
            for k in range(k_max + 1):
                lhs = poly.evaluate(mpmath.mpc(kappa * tau), k)
                rhs = kappa ** (-(poly.c + k)) * poly.evaluate(tau, k)
                worst = max(worst, abs(lhs - rhs))
        return +worst


# -- generating functions ---------------------------------------------------
def evaluate_Wm(poly: JumpPolynomial, z: complex, m: int) -> complex:
    """Generating function of walks ending at altitude ``m`` (``m < c``).

    ``W_m(z) = z * sum_j u_j'(z) / u_j(z)**(m+1)`` over the small roots.
    """
    if m >= poly.c:
        raise ValueError(f"altitude must be below c={poly.c}")
    z = complex(z)
    if z == 0:
        return 1.0 + 0j if m == 0 else 0j
    rs = roots_at(poly, z)
    if rs.degenerate:
        raise DegenerateSplitError(f"small/large split is degenerate at z={z}")
    return z * sum(root_derivative(poly, z, u) / u ** (m + 1) for u in rs.small)


@dataclass(frozen=True)
class BhValue:
    """``B_h(z)``; for dominant mode ``discrepancy = |full - dominant|``."""

    z: complex
    h: int
    mode: str
    value: complex
    full: complex
    discrepancy: float

    def to_json(self) -> dict:
        return {
            "z": cdec(self.z, 17),
            "h": self.h,
            "mode": self.mode,
            "value": cdec(self.value, 17),
            "full": cdec(self.full, 17),
            "discrepancy": dec(self.discrepancy, 17),
        }


def _bh_terms(poly: JumpPolynomial, z: complex, h: int):
    rs = roots_at(poly, z)
    if rs.degenerate:
        raise DegenerateSplitError(f"small/large split is degenerate at z={z}")
    large = rs.large
    terms = {}
    for k, vk in enumerate(large):
        others = [vm for m, vm in enumerate(large) if m != k]
        qv = complex(np.prod([vk - vm for vm in others])) if others else 1.0
        if abs(qv) < 1e-12 * max(1.0, abs(vk)) ** max(1, len(others)):
            raise DegenerateSplitError("coincident large roots")
        for j, uj in enumerate(rs.small):
            qu = complex(np.prod([uj - vm for vm in others])) if others else 1.0
            du = root_derivative(poly, z, uj)
            terms[(j, k)] = (uj / vk) ** h * qu / qv * du / vk
    return rs, terms


def evaluate_Bh(poly: JumpPolynomial, z: complex, h: int, mode: str = "full") -> BhValue:
    """Generating function of bridges whose maximum exceeds ``h``.

    ``full`` sums the double sum over small roots ``u_j`` and large roots
    ``v_k``; ``dominant`` keeps only the ``(u_1, v_1)`` term.
    """
    if mode not in ("full", "dominant"):
        raise ValueError("mode must be 'full' or 'dominant'")
    z = complex(z)
    if z == 0:
        return BhValue(z, h, mode, 0j, 0j, 0.0)
    if mode == "dominant" and (abs(z.imag) > 0 or z.real <= 0):
        raise ValueError("dominant mode needs real positive z")
    _, terms = _bh_terms(poly, z, h)
    full = z * sum(terms.values())
    if mode == "full":
        return BhValue(z, h, mode, full, full, 0.0)
    dom = z * terms[(0, 0)]
    return BhValue(z, h, mode, dom, full, float(abs(full - dom)))


def dominant_bh_closed_form(poly: JumpPolynomial, z: float, h: int) -> complex:
    """``z (u_1/v_1)^h (-u_1 v_1' / v_1^2)``; equals the dominant term when ``c = 1``."""
    rs = roots_at(poly, z)
    u1, v1 = rs.small[0], rs.large[0]
    dv = root_derivative(poly, z, v1)
    return z * (u1 / v1) ** h * (-u1 * dv / v1**2)
