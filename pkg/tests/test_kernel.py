"""Kernel roots, singularities, domination and generating-function identities."""
from __future__ import annotations

import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bridgeheight.enumerate import bridge_tail_series, count_table
from bridgeheight.errors import BranchPointError, RepeatedFactorError
from bridgeheight.kernel import (
    domination_on_circle,
    dominant_bh_closed_form,
    evaluate_Bh,
    evaluate_Wm,
    root_derivative,
    roots_at,
    singularities,
    symmetric_function_check,
    track_branch,
    track_roots,
    verify_domination,
    verify_domination_ray,
    verify_rotation_identities,
)
from bridgeheight.walk import named, structural_constants


def test_dyck_roots_closed_form():
    rs = roots_at(named("dyck"), 0.5)
    assert rs.small[0] == pytest.approx(2 - math.sqrt(3))
    assert rs.large[0] == pytest.approx(2 + math.sqrt(3))
    assert not rs.degenerate
    assert roots_at(named("dyck"), 1.0).degenerate


def test_root_counts_follow_c_and_d():
    rs = roots_at(named("negcoef"), 0.3)
    assert len(rs.small) == 3 and len(rs.large) == 1
    assert max(abs(u) for u in rs.small) < abs(rs.large[0])


def test_root_derivative_matches_finite_difference():
    poly = named("stokes")
    z, dz = 0.05, 1e-7
    u0 = track_branch(poly, z, z + dz, 1, branch=0)
    fd = (u0[1] - u0[0]) / dz
    assert abs(root_derivative(poly, z, u0[0]) - fd) < 1e-5 * abs(fd)


def test_root_derivative_raises_at_branch_point():
    with pytest.raises(BranchPointError):
        root_derivative(named("dyck"), 1.0, 1.0)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["dyck", "motzkin", "negcoef", "duchon", "luka_sq"]), st.floats(0.02, 0.9), st.floats(-math.pi, math.pi))
def test_symmetric_functions(name, r, theta):
    poly = named(name)
    rho = float(structural_constants(poly).rho)
    rs = roots_at(poly, r * rho * cmath.exp(1j * theta))
    assert symmetric_function_check(poly, rs) < 1e-9


@settings(max_examples=10, deadline=None)
@given(st.sampled_from(["dyck", "motzkin", "luka_sq", "stokes"]))
def test_small_branch_grows_on_the_real_segment(name):
    poly = named(name)
    rho = float(structural_constants(poly).rho)
    vals = track_branch(poly, 0.01 * rho, 0.99 * rho, 60)
    re = [v.real for v in vals]
    assert all(abs(v.imag) < 1e-9 for v in vals)
    assert all(a < b for a, b in zip(re, re[1:]))


@pytest.mark.parametrize("name", ["dyck", "motzkin", "duchon", "stokes"])
def test_loop_away_from_singularities_is_monodromy_free(name):
    poly = named(name)
    rho = float(structural_constants(poly).rho)
    centre, radius = 0.3 * rho, 0.1 * rho
    path = [centre + radius * cmath.exp(2j * math.pi * k / 200) for k in range(201)]
    vals = track_roots(poly, path)
    assert np.max(np.abs(vals[-1] - vals[0])) < 1e-9


def test_singularities_negcoef():
    s = singularities(named("negcoef"))
    expected = [1, complex(-0.2861480946, 1.107549741), complex(-0.2861480946, -1.107549741), -1.927703811]
    got = sorted((complex(z) for z in s.zeta), key=lambda w: (round(abs(w), 6), cmath.phase(w)))
    for g in got:
        assert min(abs(g - e) for e in expected) < 1e-8
    assert len(got) == 4


def test_singularities_repeated_factor():
    with pytest.raises(RepeatedFactorError):
        singularities(named("stokes"))


@pytest.mark.parametrize("name", ["dyck", "motzkin", "stokes", "negcoef"])
def test_domination_chain_real_axis(name):
    rep = verify_domination(named(name), 120)
    assert rep.all_ok, rep.violations[:3]


@pytest.mark.parametrize("ell", range(5))
def test_domination_chain_duchon_rays(ell):
    assert verify_domination_ray(named("duchon"), ell, 80).all_ok


def test_circle_scan_finds_violating_arc():
    rep = domination_on_circle(named("stokes"), 1e-4, 360)
    assert rep.violations
    assert rep.arcs


def test_rotation_identities_duchon():
    assert verify_rotation_identities(named("duchon"), 4, 50) < mpmath.mpf(10) ** -40


@pytest.mark.parametrize("name, z", [("dyck", 0.2), ("motzkin", 0.25), ("luka_sq", 0.2)])
def test_wm_matches_dp(name, z):
    poly = named(name)
    table = count_table(poly, 300, None, "float")
    for m in range(-3, poly.c):
        series = sum(table.value(n, m) * z**n for n in range(301))
        assert abs(evaluate_Wm(poly, z, m) - series) < 1e-10


def test_wm_rejects_high_altitude():
    with pytest.raises(ValueError):
        evaluate_Wm(named("dyck"), 0.2, 1)


@pytest.mark.parametrize("name", ["dyck", "motzkin", "stokes", "negcoef"])
def test_bh_matches_dp(name):
    poly = named(name)
    z = 0.2 * float(structural_constants(poly).rho)
    for h in (1, 2, 3):
        s = bridge_tail_series(poly, 300, h, "float")
        series = sum(s[n] * z**n for n in range(301))
        assert abs(evaluate_Bh(poly, z, h).value - series) < 1e-10


def test_dominant_mode_equals_closed_form_for_lukasiewicz():
    poly = named("luka_sq")
    for h in (1, 4):
        dom = evaluate_Bh(poly, 0.3, h, "dominant").value
        assert abs(dom - dominant_bh_closed_form(poly, 0.3, h)) < 1e-12 * abs(dom)


def test_dominant_discrepancy_is_zero_for_simple_walks():
    assert evaluate_Bh(named("motzkin"), 0.25, 3, "dominant").discrepancy < 1e-15
