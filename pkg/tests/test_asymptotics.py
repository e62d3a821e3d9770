"""Saddle-point constants, the Rayleigh limit and the tail expansion."""
from __future__ import annotations

import math
import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bridgeheight.asymptotics import (
    evaluate_tail,
    hermite_skeleton_check,
    luka_expansion,
    predicted_skeleton,
    rayleigh_ceiling,
    rayleigh_tail,
    saddle_expansion,
    vn_asymptotic,
)
from bridgeheight.enumerate import andre_reflection, bridge_tail_ratio, unbounded_bridge_count
from bridgeheight.errors import NotLukasiewiczError, NotReducedError
from bridgeheight._num import to_mp
from bridgeheight.walk import JumpPolynomial, named, period, random_centered_lukasiewicz, structural_constants


def _gamma_ratio_coefficients(order: int) -> list:
    """Coefficients of ``sqrt(k) Gamma(k + 1/2) / Gamma(k + 1)`` in powers of ``1/k``.

    Uses ``log Gamma(k+a) - log Gamma(k+b) ~ (a-b) log k
    + sum_j (-1)^(j+1) (B_{j+1}(a) - B_{j+1}(b)) / (j (j+1) k^j)`` and a
    hand-rolled exponential of the resulting series.
    """
    a, b = mpmath.mpf(1) / 2, mpmath.mpf(1)
    log_c = [mpmath.mpf(0)] + [
        (-1) ** (j + 1) * (mpmath.bernpoly(j + 1, a) - mpmath.bernpoly(j + 1, b)) / (j * (j + 1))
        for j in range(1, order + 1)
    ]
    # exp of a series with zero constant term: e' = l' e
    e = [mpmath.mpf(1)] + [mpmath.mpf(0)] * order
    for n in range(1, order + 1):
        e[n] = sum(k * log_c[k] * e[n - k] for k in range(1, n + 1)) / n
    return e


def test_dyck_saddle_constants_against_gamma_ratio():
    order = 6
    with mpmath.workdps(50):
        ref_k = _gamma_ratio_coefficients(order)
        # n = 2k, so 1/k^j = 2^j / n^j
        ref_n = [c * 2**j for j, c in enumerate(ref_k)]
        got = saddle_expansion(named("dyck"), order, 50).coefficients
        for g, r in zip(got, ref_n):
            assert abs(g - r) < mpmath.mpf(10) ** -35


def test_dyck_saddle_constants_frozen():
    frozen = [1, Fraction(-1, 4), Fraction(1, 32), Fraction(5, 128), Fraction(-21, 2048), Fraction(-399, 8192), Fraction(869, 65536)]
    with mpmath.workdps(50):
        got = saddle_expansion(named("dyck"), 6, 50).coefficients
        for g, r in zip(got, frozen):
            assert abs(g - to_mp(r)) < mpmath.mpf(10) ** -35


def test_motzkin_weights_one_local_limit():
    exact = unbounded_bridge_count(named("motzkin1"), 100)
    with mpmath.workdps(50):
        est = vn_asymptotic(named("motzkin1"), 100, 0)
        closed = mpmath.sqrt(mpmath.mpf(3) / 2) * mpmath.mpf(3) ** 100 / mpmath.sqrt(200 * mpmath.pi)
        assert abs(est - closed) < mpmath.mpf(10) ** -30 * closed
        ratio = to_mp(exact) / closed
    assert 0.99 <= ratio <= 1.01


def test_higher_order_improves_local_limit():
    poly = named("motzkin")
    n = 60
    with mpmath.workdps(50):
        exact = to_mp(unbounded_bridge_count(poly, n))
        errs = [abs(vn_asymptotic(poly, n, k) / exact - 1) for k in range(5)]
    assert all(a > b for a, b in zip(errs, errs[1:]))


def test_periodic_local_limit():
    poly = named("duchon")
    assert vn_asymptotic(poly, 101) == 0
    with mpmath.workdps(50):
        ratio = vn_asymptotic(poly, 100) / to_mp(unbounded_bridge_count(poly, 100))
    assert abs(ratio - 1) < 0.1


def test_saddle_requires_reduced_walk():
    with pytest.raises(NotReducedError):
        saddle_expansion(named("period6"))


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6))
def test_saddle_scale_covariance(seed):
    poly = random_centered_lukasiewicz(random.Random(seed))
    scaled = poly.scaled(3)
    n = 20 * period(poly)
    with mpmath.workdps(50):
        a = saddle_expansion(poly, 3, 40)
        b = saddle_expansion(scaled, 3, 40)
        assert abs(a.lambda0 - b.lambda0) < mpmath.mpf(10) ** -30
        for x, y in zip(a.coefficients, b.coefficients):
            assert abs(x - y) < mpmath.mpf(10) ** -30
        growth = vn_asymptotic(scaled, n, 2) / vn_asymptotic(poly, n, 2)
        assert abs(growth / mpmath.mpf(3) ** n - 1) < mpmath.mpf(10) ** -30


def test_rayleigh_limit_non_normalized():
    with mpmath.workdps(30):
        assert abs(rayleigh_tail(named("motzkin1"), 0.5) - mpmath.exp(-1.5)) < mpmath.mpf(10) ** -25
        assert abs(rayleigh_tail(named("dyck"), 1) - mpmath.exp(-2)) < mpmath.mpf(10) ** -25


def test_rayleigh_ceiling_is_floor():
    prof = structural_constants(named("dyck"))
    assert rayleigh_ceiling(prof, 64, 1) == 8
    assert rayleigh_ceiling(prof, 64, 0.99) == 7


def test_expansion_first_terms():
    exp = luka_expansion(named("dyck"), 2, 40)
    assert float(exp.terms_x[1][1]) == pytest.approx(-4)
    num = [float(c) for c in exp.numerator_x[2]]
    assert num == pytest.approx([-2.25, 0, 10, 0, -4 / 3])


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_first_order_term_general_form(seed):
    # He coefficient -3/(2 sigma) - xi/(6 sigma^3), monomial -6/sigma - 2 xi/(3 sigma^3)
    poly = random_centered_lukasiewicz(random.Random(seed))
    with mpmath.workdps(50):
        exp = luka_expansion(poly, 1, 50)
        s = mpmath.sqrt(to_mp(poly.derivative_at_one(2)))
        xi = to_mp(poly.derivative_at_one(3))
        assert abs(exp.terms_He[1][(1, 0)] - (-mpmath.mpf(3) / (2 * s) - xi / (6 * s**3))) < mpmath.mpf(10) ** -40
        assert abs(exp.terms_x[1][1] - (-6 / s - 2 * xi / (3 * s**3))) < mpmath.mpf(10) ** -40


def test_dyck_expansion_converges_to_reflection():
    exp = luka_expansion(named("dyck"), 7, 50)
    exact = andre_reflection(64, 9)
    with mpmath.workdps(50):
        errs = [abs(evaluate_tail(exp, 64, 1, k) - to_mp(exact)) for k in (0, 1, 3, 5, 7)]
    assert all(a > b for a, b in zip(errs, errs[1:]))
    assert errs[-1] < 1e-9


@pytest.mark.parametrize("n, h", [(400, 20), (900, 30)])
def test_expansion_against_dp_for_skewed_walk(n, h):
    poly = named("luka_sq")
    exp = luka_expansion(poly, 7, 40)
    dp = bridge_tail_ratio(poly, n, h, "float")
    with mpmath.workdps(40):
        x = mpmath.mpf(h) / mpmath.sqrt(n)
        e1 = abs(evaluate_tail(exp, n, x, 1) - dp)
        e7 = abs(evaluate_tail(exp, n, x, 7) - dp)
    assert e7 < 1e-6
    assert e7 < e1 / 100


def test_expansion_requires_lukasiewicz():
    with pytest.raises(NotLukasiewiczError):
        luka_expansion(JumpPolynomial.from_mapping({-2: Fraction(1, 3), 1: Fraction(2, 3)}), 2)


def test_skeleton_sets():
    assert predicted_skeleton(0) == {(0, 0)}
    assert predicted_skeleton(1) == {(1, 0)}
    assert predicted_skeleton(2) == {(2, 0), (3, 1), (4, 0)}


@pytest.mark.parametrize("name", ["dyck", "luka_sq"])
def test_skeleton_containment(name):
    exp = luka_expansion(named(name), 5, 50)
    for k in range(6):
        check = hermite_skeleton_check(exp, k)
        assert check.ok, check.to_json()
