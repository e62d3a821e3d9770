"""Acceptance suite: twelve end-to-end criteria at fixed tolerances.

Each test prints one ``criterion N: PASS|FAIL`` line; the lines are also
collected and repeated in the pytest terminal summary.  Run directly with
``python tests/test_acceptance.py`` for the lines alone.
"""
from __future__ import annotations

import json
import math
import random
import time

import mpmath

from bridgeheight.asymptotics import (
    hermite_skeleton_check,
    luka_expansion,
    observed_support,
    rayleigh_ceiling,
    vn_asymptotic,
)
from bridgeheight.enumerate import (
    andre_reflection,
    bridge_tail_ratio,
    bridge_tail_series,
    count_table,
    unbounded_bridge_count,
)
from bridgeheight.hermite import gamma_hankel, he_identity_check, q_family
from bridgeheight.kernel import (
    domination_on_circle,
    evaluate_Bh,
    evaluate_Wm,
    singularities,
    verify_domination,
    verify_domination_ray,
    verify_rotation_identities,
)
from bridgeheight.series import kernel_residual, newton_branch
from bridgeheight._num import to_mp
from bridgeheight.walk import named, random_centered_lukasiewicz, structural_constants

from conftest import run_cli

RESULTS: list[str] = []


def report(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def _fit_ratio(values: list[float]) -> float:
    pts = [(i, math.log(v)) for i, v in enumerate(values)]
    mx = sum(p[0] for p in pts) / len(pts)
    my = sum(p[1] for p in pts) / len(pts)
    slope = sum((a - mx) * (b - my) for a, b in pts) / sum((a - mx) ** 2 for a, _ in pts)
    return math.exp(slope)


def test_criterion_01_dyck_benchmark():
    done = run_cli("tail", "-p", "-1:1/2,1:1/2", "--n", "64", "--x", "1", "--order", "7", "--compare", "andre")
    out = json.loads(done.stdout) if done.returncode == 0 else {}
    exact = andre_reflection(64, 9)
    with mpmath.workdps(60):
        diff = abs(mpmath.mpf(out.get("expansion", "nan")) - to_mp(exact)) if out else mpmath.inf
    ok = done.returncode == 0 and out["h"] == 8 and diff <= 1e-7
    report(1, ok, f"|tail - C(64,41)/C(64,32)| = {mpmath.nstr(diff, 4)} (tol 1e-7)")


def test_criterion_02_reflection_oracle():
    dyck1 = named("dyck1")
    mismatches = []
    for n in range(2, 65, 2):
        for h in range(1, n // 2 + 1):
            if bridge_tail_ratio(dyck1, n, h - 1, "exact") != andre_reflection(n, h):
                mismatches.append((n, h))
    report(2, not mismatches, f"exact tail vs reflection on all even n <= 64, mismatches {mismatches[:5]}")


def test_criterion_03_rayleigh_convergence():
    poly = named("motzkin")
    prof = structural_constants(poly)
    ns, xs = (100, 400, 1600), (0.5, 1.0, 1.5)
    errs = {}
    for x in xs:
        limit = math.exp(-2 * x * x)
        for n in ns:
            h = rayleigh_ceiling(prof, n, x)
            errs[(n, x)] = abs(bridge_tail_ratio(poly, n, h, "float") - limit)
    bad_env = [(n, x) for (n, x), e in errs.items() if e > 0.6 / math.sqrt(n)]
    bad_mono = [(n, x) for x in xs for n, m in zip(ns, ns[1:]) if errs[(m, x)] > 2 * errs[(n, x)]]
    worst = max(e * math.sqrt(n) / 0.6 for (n, x), e in errs.items())
    report(
        3,
        not bad_env and not bad_mono,
        f"worst err/envelope {worst:.3f}; envelope misses {bad_env}; monotonicity misses {bad_mono}",
    )


def test_criterion_04_exponent_discrimination():
    poly = named("motzkin1")
    prof = structural_constants(poly)
    h = rayleigh_ceiling(prof, 1600, 0.5)
    beta = bridge_tail_ratio(poly, 1600, h, "float")
    near, far = abs(beta - math.exp(-1.5)), abs(beta - math.exp(-1 / 6))
    ok = near <= 0.05 and far >= 10 * near
    report(4, ok, f"beta={beta:.6f}, |beta-e^-1.5|={near:.4f}, |beta-e^-1/6|={far:.4f}")


def test_criterion_05_periodicity():
    poly = named("duchon")
    nonzero = [n for n in range(1, 61) if n % 5 and unbounded_bridge_count(poly, n, "exact") != 0]
    with mpmath.workdps(50):
        ratio = vn_asymptotic(poly, 100, 0, 50) / to_mp(unbounded_bridge_count(poly, 100, "exact"))
    dev = verify_rotation_identities(poly, 4, 50)
    ok = not nonzero and abs(ratio - 1) <= 0.1 and dev <= mpmath.mpf("1e-12")
    report(5, ok, f"off-period nonzero {nonzero}; V100 ratio {mpmath.nstr(ratio, 6)}; rotation dev {mpmath.nstr(dev, 3)}")


def test_criterion_06_local_limit():
    exact = unbounded_bridge_count(named("motzkin1"), 100, "exact")
    with mpmath.workdps(50):
        ref = mpmath.sqrt(mpmath.mpf(3) / 2) * mpmath.mpf(3) ** 100 / mpmath.sqrt(200 * mpmath.pi)
        ratio = to_mp(exact) / ref
    report(6, 0.99 <= ratio <= 1.01, f"V100 / closed form = {mpmath.nstr(ratio, 8)}")


def test_criterion_07_singularity_set():
    expected = [complex(1, 0), complex(-1.927703811, 0), complex(-0.2861480946, 1.107549741), complex(-0.2861480946, -1.107549741)]
    got = [complex(z) for z in singularities(named("negcoef")).zeta]
    dist = max(min(abs(g - e) for g in got) for e in expected)
    ok = len(got) == 4 and dist <= 1e-8
    report(7, ok, f"{len(got)} singularities, worst distance {dist:.2e}")


def test_criterion_08_domination():
    fails = []
    for name in ("dyck", "motzkin", "stokes"):
        rep = verify_domination(named(name), 200)
        if not rep.all_ok or len(rep.grid) != 200:
            fails.append(name)
    for ell in range(5):
        rep = verify_domination_ray(named("duchon"), ell, 200)
        if not rep.all_ok or len(rep.grid) != 200:
            fails.append(f"duchon_ray_{ell}")
    circle = domination_on_circle(named("stokes"), 1e-4, 720)
    ok = not fails and len(circle.arcs) >= 1
    report(8, ok, f"chain failures {fails}; circle r=1e-4 violating arcs {len(circle.arcs)}")


def test_criterion_09_series_residuals():
    rng = random.Random(2024)
    walks = [named("dyck"), named("luka_sq")] + [random_centered_lukasiewicz(rng) for _ in range(3)]
    worst = mpmath.mpf(0)
    with mpmath.workdps(65):
        for w in walks:
            br = newton_branch(w, "u1", 30, "float", 50)
            res = kernel_residual(w, br.series, 1, 50)
            worst = max(worst, max(abs(a) for a in res.coeffs))
        r2 = mpmath.sqrt(2)
        closed = [1, -r2, 1, -3 * r2 / 4, 1, -23 * r2 / 32]
        dyck = newton_branch(named("dyck"), "u1", 30, "float", 50).series
        mis = max(abs(a - b) for a, b in zip(dyck.coeffs, closed))
    ok = worst < mpmath.mpf("1e-40") and mis < mpmath.mpf("1e-40")
    report(9, ok, f"max residual {mpmath.nstr(worst, 3)}; Dyck closed-form mismatch {mpmath.nstr(mis, 3)}")


FROZEN_Q_ROWS = {
    0: (1,),
    1: (0, -4),
    2: (-4, 0, 16),
    3: (0, 48, 0, -64),
    4: (48, 0, -384, 0, 256),
    5: (0, -960, 0, 2560, 0, -1024),
    6: (-960, 0, 11520, 0, -15360, 0, 4096),
    7: (0, 26880, 0, -107520, 0, 86016, 0, -16384),
    8: (26880, 0, -430080, 0, 860160, 0, -458752, 0, 65536),
}


def test_criterion_10_hermite_tables():
    rows_ok = all(q_family(r).coeffs == row for r, row in FROZEN_Q_ROWS.items())
    with mpmath.workdps(40):
        g_err = abs(gamma_hankel(mpmath.mpf(-0.5)) + 1 / (2 * mpmath.sqrt(mpmath.pi)))
    ident = he_identity_check(20)
    recorded = all(ident.corrected_holds) and ident.to_json()["candidate_failures"] == ident.candidate_failures
    ok = rows_ok and g_err <= 1e-12 and recorded
    report(
        10,
        ok,
        f"rows r<=8 {'match' if rows_ok else 'differ'}; G(-1/2) err {mpmath.nstr(g_err, 3)}; "
        f"Q_i = (-1)^i He_i(4x) fails at i={ident.candidate_failures[:3]}..., "
        f"Q_i = (-2)^i He_i(2x) holds for i<=20",
    )


def test_criterion_11_identity_checks():
    worst = 0.0
    n_max = 400
    for name in ("dyck", "motzkin"):
        poly = named(name)
        table = count_table(poly, n_max, None, "float")
        tails = {h: bridge_tail_series(poly, n_max, h, "float") for h in (1, 2, 3)}
        for z in (0.2, 0.25):
            for m in (0, -1, -2):
                series = sum(table.value(n, m) * z**n for n in range(n_max + 1))
                worst = max(worst, abs(evaluate_Wm(poly, z, m) - series))
            for h in (1, 2, 3):
                series = sum(tails[h][n] * z**n for n in range(n_max + 1))
                worst = max(worst, abs(evaluate_Bh(poly, z, h).value - series))
    # With c = d = 1 the dominant term is the whole sum; decay is measured on u + 3/u + 1/u^2.
    simple = max(evaluate_Bh(named(nm), 0.25, h, "dominant").discrepancy for nm in ("dyck", "motzkin") for h in range(1, 9))
    stokes = named("stokes")
    z = 0.2 * float(structural_constants(stokes).rho)
    disc = [evaluate_Bh(stokes, z, h, "dominant").discrepancy for h in range(1, 9)]
    ratio = _fit_ratio(disc)
    ok = worst <= 1e-8 and ratio < 1 and simple < 1e-14
    report(
        11,
        ok,
        f"max |closed form - DP| {worst:.2e}; dominant discrepancy (c=d=1) {simple:.1e}; fitted ratio {ratio:.4f}",
    )


def test_criterion_12_hermite_skeleton():
    exact_low = [{(0, 0)}, {(1, 0)}, {(2, 0), (3, 1), (4, 0)}]
    problems = []
    for name in ("dyck", "luka_sq"):
        exp = luka_expansion(named(name), 5, 50)
        for k in range(6):
            if not hermite_skeleton_check(exp, k).ok:
                problems.append((name, k, "outside"))
        for k, want in enumerate(exact_low):
            if observed_support(exp, k) != want:
                problems.append((name, k, sorted(observed_support(exp, k))))
    report(12, not problems, f"skeleton problems {problems}")


def main() -> int:
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            t0 = time.perf_counter()
            try:
                fn()
            except AssertionError:
                failed += 1
            print(f"              ({time.perf_counter() - t0:.2f} s)")
    return 1 if failed else 0


if __name__ == "__main__":
    raise SystemExit(main())
