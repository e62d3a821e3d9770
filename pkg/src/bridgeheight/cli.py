"""Command-line front end.

Subcommands: ``analyze``, ``enumerate``, ``tail``, ``expand``, ``roots``,
``verify``.  Results go to standard output as JSON (sorted keys, reals as
decimal strings) or CSV; diagnostics go to standard error.

Exit codes: 0 success, 1 domain error or failed verification, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import random
import sys
from fractions import Fraction
from typing import Callable

import mpmath

from . import __version__
from ._num import cdec, dec, to_mp
from .asymptotics import (
    evaluate_tail,
    hermite_skeleton_check,
    luka_expansion,
    rayleigh_ceiling,
    rayleigh_tail,
    vn_asymptotic,
)
from .enumerate import (
    andre_reflection,
    bounded_bridge_weight,
    bridge_tail_ratio,
    bridge_tail_series,
    count_table,
    unbounded_bridge_count,
)
from .errors import BridgeError
from .kernel import (
    domination_on_circle,
    evaluate_Bh,
    evaluate_Wm,
    roots_at,
    singularities,
    track_roots,
    verify_domination,
    verify_domination_ray,
    verify_rotation_identities,
)
from .series import kernel_residual, newton_branch
from .walk import (
    JumpPolynomial,
    center,
    parse_polynomial,
    period,
    random_centered_lukasiewicz,
    structural_constants,
)

SUITES = ("domination", "periodic", "series", "wm-identity", "bh-identity", "rayleigh-scan")


class UsageError(Exception):
    """Flag combination rejected after parsing (exit code 2)."""


# -- argument handling ------------------------------------------------------
def _normalize_argv(argv: list[str]) -> list[str]:
    """Glue ``-p VALUE`` into ``--poly=VALUE`` so values starting with ``-`` parse."""
    out = []
    i = 0
    while i < len(argv):
        a = argv[i]
        if a in ("-p", "--poly") and i + 1 < len(argv):
            out.append(f"--poly={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from exc


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bridgeheight", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, poly_required=True):
        p.add_argument("-p", "--poly", required=poly_required, help="jump:weight list, e.g. -1:1/2,1:1/2")
        p.add_argument("--precision", type=int, default=50, help="decimal digits (default 50)")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("analyze", help="structural constants of a walk")
    common(p)

    p = sub.add_parser("enumerate", help="exact dynamic-programming tables")
    common(p)
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--h", type=_positive_int, default=None, help="ceiling (omit for none)")
    p.add_argument("--mode", choices=("exact", "float"), default=None)

    p = sub.add_parser("tail", help="tail expansion at (n, x) with an oracle comparison")
    common(p)
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--order", type=_positive_int, default=7)
    p.add_argument("--compare", choices=("andre", "dp", "none"), default="none")
    p.add_argument("--mode", choices=("exact", "float"), default=None)

    p = sub.add_parser("expand", help="dump the tail expansion coefficients")
    common(p)
    p.add_argument("--order", type=_positive_int, default=7)

    p = sub.add_parser("roots", help="kernel roots, circle scans, branch tracking")
    common(p)
    p.add_argument("--z", type=_complex, default=None, help="solve the kernel at this argument")
    p.add_argument("--radius", type=float, default=None, help="circle scan radius")
    p.add_argument("--samples", type=_positive_int, default=360)
    p.add_argument("--grid", default=None, help="track along a segment: 'z0,z1,steps'")

    p = sub.add_parser("verify", help="run a named property suite")
    common(p)
    p.add_argument("--suite", choices=SUITES, required=True)
    p.add_argument("--samples", type=_positive_int, default=200)
    p.add_argument("--radius", type=float, default=None)
    p.add_argument("--n", type=_positive_int, default=None)
    p.add_argument("--x", type=float, default=None)
    p.add_argument("--z", type=_complex, default=None)
    p.add_argument("--order", type=_positive_int, default=30)
    return parser


# -- output -----------------------------------------------------------------
def _csv(rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def _flat_rows(obj, prefix="") -> list[list[str]]:
    rows = []
    if isinstance(obj, dict):
        for k in sorted(obj):
            rows += _flat_rows(obj[k], f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            rows += _flat_rows(v, f"{prefix}[{i}]")
    else:
        rows.append([prefix, "" if obj is None else str(obj).lower() if isinstance(obj, bool) else str(obj)])
    return rows


# -- subcommands ------------------------------------------------------------
def cmd_analyze(args, poly: JumpPolynomial):
    prof = structural_constants(poly, args.precision)
    try:
        singularities(poly, args.precision)
        simple = True
    except BridgeError:
        simple = False
    out = {"command": "analyze", "profile": prof.to_json(), "simple_singularities": simple}
    return out, [["key", "value"]] + _flat_rows(prof.to_json())


def cmd_enumerate(args, poly):
    table = count_table(poly, args.n, args.h, args.mode)
    out = {
        "command": "enumerate",
        "table": table.to_json(),
        "bridges": _render(unbounded_bridge_count(poly, args.n, table.mode)),
    }
    if args.h is not None:
        out["bridges_at_most_h"] = _render(table.value(args.n, 0))
        out["bridges_above_h"] = _render(unbounded_bridge_count(poly, args.n, table.mode) - table.value(args.n, 0))
    return out, list(csv.reader(io.StringIO(table.to_csv())))


def _render(v) -> str:
    if isinstance(v, Fraction):
        return str(v)
    return repr(float(v))


def _is_simple_dyck(poly: JumpPolynomial) -> bool:
    return poly.support == (-1, 1) and poly.weights[0][1] == poly.weights[1][1]


def _centered(poly: JumpPolynomial, precision: int) -> JumpPolynomial:
    return poly if poly.is_centered() else center(poly, "auto", precision)


def cmd_tail(args, poly):
    if args.x <= 0:
        raise UsageError("--x must be positive")
    cpoly = _centered(poly, args.precision)
    exp = luka_expansion(cpoly, args.order, args.precision, max_order=None)
    prof = structural_constants(cpoly, args.precision)
    h = rayleigh_ceiling(prof, args.n, args.x)
    value = evaluate_tail(exp, args.n, args.x)
    out = {
        "command": "tail",
        "polynomial": poly.text(),
        "centered_polynomial": cpoly.text(),
        "n": args.n,
        "x": dec(to_mp(args.x), args.precision),
        "h": h,
        "order": args.order,
        "expansion": dec(value, args.precision),
        "rayleigh_limit": dec(rayleigh_tail(cpoly, args.x, args.precision), args.precision),
        "compare": args.compare,
        "reference": None,
        "abs_difference": None,
    }
    ref = None
    if args.compare == "andre":
        if not _is_simple_dyck(poly):
            raise UsageError("--compare andre needs a walk with jumps +-1 of equal weight")
        if args.n % 2 or h + 1 > args.n // 2:
            raise UsageError("--compare andre needs even n and h < n/2")
        ref = andre_reflection(args.n, h + 1)
    elif args.compare == "dp":
        ref = bridge_tail_ratio(poly, args.n, h, args.mode)
    if ref is not None:
        with mpmath.workdps(args.precision + 10):
            r = to_mp(ref) if isinstance(ref, Fraction) else mpmath.mpf(ref)
            out["reference"] = dec(r, args.precision)
            out["abs_difference"] = dec(abs(value - r), 6)
    return out, [["key", "value"]] + _flat_rows(out)


def cmd_expand(args, poly):
    cpoly = _centered(poly, args.precision)
    exp = luka_expansion(cpoly, args.order, args.precision, max_order=None)
    out = {"command": "expand", "polynomial": poly.text(), "expansion": exp.to_json()}
    rows = [["k", "kind", "he_index", "x_degree", "coefficient"]]
    for k, row in enumerate(exp.terms_x):
        for i, cval in enumerate(row):
            if cval != 0:
                rows.append([k, "monomial", "", i, dec(cval, args.precision)])
    for k, row in enumerate(exp.terms_He):
        for (a, b), cval in sorted(row.items()):
            rows.append([k, "hermite", a, b, dec(cval, args.precision)])
    return out, rows


def cmd_roots(args, poly):
    modes = [args.z is not None, args.radius is not None, args.grid is not None]
    if sum(modes) > 1:
        raise UsageError("use at most one of --z, --radius, --grid")
    if args.z is not None:
        rs = roots_at(poly, args.z)
        out = {"command": "roots", "kind": "system", "system": rs.to_json()}
        rows = [["kind", "index", "re", "im"]]
        rows += [["small", i] + cdec(u, 17) for i, u in enumerate(rs.small)]
        rows += [["large", i] + cdec(v, 17) for i, v in enumerate(rs.large)]
        return out, rows
    if args.radius is not None:
        if args.radius <= 0:
            raise UsageError("--radius must be positive")
        rep = domination_on_circle(poly, args.radius, max(args.samples, 8))
        out = {"command": "roots", "kind": "circle", "circle": rep.to_json(), "radius": dec(args.radius, 17)}
        rows = [["angle", "ordered"] + [f"abs_small_{i}" for i in range(poly.c)]]
        for a, ok, mods in zip(rep.angles, rep.chain_ok, rep.tracked_moduli):
            rows.append([dec(a, 17), str(ok).lower()] + [dec(m, 17) for m in mods])
        return out, rows
    if args.grid is not None:
        try:
            z0, z1, steps = args.grid.split(",")
            z0, z1, steps = _complex(z0), _complex(z1), int(steps)
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise UsageError("--grid must look like 'z0,z1,steps'") from exc
        if steps < 1:
            raise UsageError("--grid needs at least one step")
        path = [z0 + (z1 - z0) * k / steps for k in range(steps + 1)]
        vals = track_roots(poly, path)
        out = {
            "command": "roots",
            "kind": "track",
            "track": {
                "path": [cdec(z, 17) for z in path],
                "branches": [[cdec(v, 17) for v in vals[:, b]] for b in range(vals.shape[1])],
            },
        }
        rows = [["step", "branch", "re", "im"]]
        for s in range(vals.shape[0]):
            for b in range(vals.shape[1]):
                rows.append([s, b] + cdec(vals[s, b], 17))
        return out, rows
    sing = singularities(poly, args.precision)
    out = {"command": "roots", "kind": "singularities", "singularities": sing.to_json()}
    rows = [["index", "upsilon_re", "upsilon_im", "zeta_re", "zeta_im"]]
    for i, (u, z) in enumerate(zip(sing.upsilon, sing.zeta)):
        rows.append([i] + cdec(u, args.precision) + cdec(z, args.precision))
    return out, rows


# -- verification suites ----------------------------------------------------
def _check(name: str, passed: bool, **values) -> dict:
    return {"name": name, "passed": bool(passed), "values": {k: str(v) for k, v in sorted(values.items())}}


def suite_domination(args, poly):
    checks = []
    p = period(poly)
    for ell in range(p):
        rep = verify_domination(poly, args.samples) if ell == 0 else verify_domination_ray(poly, ell, args.samples)
        checks.append(
            _check(f"chain_ray_{ell}", rep.all_ok, samples=len(rep.grid), A_hat=dec(rep.A_hat, 12),
                   B_hat=dec(rep.B_hat, 12), violations=len(rep.violations), skipped=len(rep.skipped))
        )
    if args.radius is not None:
        rep = domination_on_circle(poly, args.radius, max(args.samples, 8))
        checks.append(
            _check("circle_scan", True, radius=args.radius, violations=len(rep.violations),
                   arcs=";".join(f"{a:.6f}:{b:.6f}" for a, b in rep.arcs))
        )
    return checks


def suite_periodic(args, poly):
    p = period(poly)
    n_max = args.n if args.n is not None else 60
    bad = [n for n in range(1, n_max + 1) if n % p and unbounded_bridge_count(poly, n, "exact") != 0]
    checks = [_check("vanishing_off_multiples", not bad, period=p, n_max=n_max, offenders=bad[:10])]
    dev = verify_rotation_identities(poly, 4, args.precision)
    checks.append(_check("rotation_identities", dev <= mpmath.mpf("1e-12"), deviation=mpmath.nstr(dev, 6)))
    n = p * math.ceil(100 / p)
    est = vn_asymptotic(poly, n, 0, args.precision)
    exact = unbounded_bridge_count(poly, n, "exact")
    with mpmath.workdps(args.precision):
        ratio = est / to_mp(exact)
    checks.append(_check("saddle_estimate", abs(ratio - 1) <= mpmath.mpf("0.1"), n=n, ratio=mpmath.nstr(ratio, 12)))
    return checks


def suite_series(args, poly):
    rng = random.Random(args.seed)
    walks = [("input", _centered(poly, args.precision))]
    walks += [(f"random_{i}", random_centered_lukasiewicz(rng)) for i in range(3)]
    checks = []
    thresh = mpmath.mpf(10) ** (-args.precision + 10)
    for label, w in walks:
        br = newton_branch(w, "u1", args.order, "float", args.precision)
        res = kernel_residual(w, br.series, 1, args.precision)
        worst = max(abs(a) for a in res.coeffs)
        conj = newton_branch(w, "v1", args.order, "float", args.precision).series
        cmis = max(abs(a - b) for a, b in zip(conj.coeffs, br.series.reflect().coeffs))
        vals = br.residual_valuations
        doubling = all(v - 2 >= 2**k for k, v in enumerate(vals[:-1]))
        checks.append(
            _check(f"branch_{label}", worst < thresh and cmis < thresh and doubling, polynomial=w.text(),
                   residual=mpmath.nstr(worst, 6), conjugacy=mpmath.nstr(cmis, 6), valuations=list(vals))
        )
    return checks


def _default_zs(poly, args):
    if args.z is not None:
        return [args.z]
    rho = float(structural_constants(poly).rho)
    return [0.2 * rho, 0.25 * rho]


def suite_wm(args, poly):
    checks = []
    n_max = args.n if args.n is not None else 400
    table = count_table(poly, n_max, None, "float")
    for z in _default_zs(poly, args):
        for m in sorted(set(range(-2, poly.c))):
            series_val = sum(table.value(n, m) * z**n for n in range(n_max + 1))
            val = evaluate_Wm(poly, z, m)
            checks.append(_check(f"W_{m}_at_{z}", abs(val - series_val) <= 1e-8, value=val, dp=series_val))
    return checks


def suite_bh(args, poly):
    checks = []
    n_max = args.n if args.n is not None else 400
    for z in _default_zs(poly, args):
        for h in (1, 2, 3):
            s = bridge_tail_series(poly, n_max, h, "float")
            series_val = sum(s[n] * z**n for n in range(n_max + 1))
            val = evaluate_Bh(poly, z, h).value
            checks.append(_check(f"B_{h}_at_{z}", abs(val - series_val) <= 1e-8, value=val, dp=series_val))
        z_real = complex(z).real
        disc = [evaluate_Bh(poly, z_real, h, "dominant").discrepancy for h in range(1, 9)]
        if max(disc) < 1e-15:
            checks.append(_check(f"dominant_decay_at_{z}", True, note="single dominant term; discrepancy 0"))
        else:
            ratio = _fit_ratio(disc)
            checks.append(_check(f"dominant_decay_at_{z}", ratio < 1, ratio=ratio))
    return checks


def _fit_ratio(values: list[float]) -> float:
    """Least-squares slope of log(values) against the index, exponentiated."""
    pts = [(i, math.log(v)) for i, v in enumerate(values) if v > 0]
    n = len(pts)
    mx = sum(p[0] for p in pts) / n
    my = sum(p[1] for p in pts) / n
    slope = sum((a - mx) * (b - my) for a, b in pts) / sum((a - mx) ** 2 for a, _ in pts)
    return math.exp(slope)


def suite_rayleigh(args, poly):
    prof = structural_constants(poly, args.precision)
    ns = [args.n] if args.n is not None else [100, 400, 1600]
    xs = [args.x] if args.x is not None else [0.5, 1.0, 1.5]
    checks = []
    for x in xs:
        limit = rayleigh_tail(poly, x, args.precision)
        for n in ns:
            h = rayleigh_ceiling(prof, n, x)
            beta = bridge_tail_ratio(poly, n, h, "float")
            err = abs(float(beta) - float(limit))
            env = 0.6 / math.sqrt(n)
            checks.append(_check(f"n{n}_x{x}", err <= env, h=h, beta=repr(float(beta)),
                                 limit=mpmath.nstr(limit, 15), error=repr(err), envelope=repr(env)))
    return checks


SUITE_FUNCS: dict[str, Callable] = {
    "domination": suite_domination,
    "periodic": suite_periodic,
    "series": suite_series,
    "wm-identity": suite_wm,
    "bh-identity": suite_bh,
    "rayleigh-scan": suite_rayleigh,
}


def cmd_verify(args, poly):
    checks = SUITE_FUNCS[args.suite](args, poly)
    passed = all(c["passed"] for c in checks)
    out = {"command": "verify", "suite": args.suite, "polynomial": poly.text(), "passed": passed, "checks": checks}
    rows = [["check", "passed"]] + [[c["name"], str(c["passed"]).lower()] for c in checks]
    return out, rows


COMMANDS = {
    "analyze": cmd_analyze,
    "enumerate": cmd_enumerate,
    "tail": cmd_tail,
    "expand": cmd_expand,
    "roots": cmd_roots,
    "verify": cmd_verify,
}


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    """Parse ``argv``, dispatch, and return the exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_normalize_argv(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.precision < 5 or args.precision > 1000:
        print("error: --precision must lie in [5, 1000]", file=stderr)
        return 2
    try:
        poly = parse_polynomial(args.poly)
    except BridgeError as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    try:
        with mpmath.workdps(args.precision + 10):
            out, rows = COMMANDS[args.command](args, poly)
    except UsageError as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    except BridgeError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=stderr)
        return 1
    if args.format == "json":
        stdout.write(json.dumps(out, sort_keys=True, indent=2) + "\n")
    else:
        stdout.write(_csv(rows))
    if args.command == "verify" and not out["passed"]:
        failed = [c["name"] for c in out["checks"] if not c["passed"]]
        print(f"verification failed: {', '.join(failed)}", file=stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())
