"""Command-line behaviour, driven through a subprocess."""
from __future__ import annotations

import csv
import io
import json

import jsonschema
import pytest

from bridgeheight.schemas import NAMES, load_schema

from conftest import run_cli, run_json

DYCK = "-1:1/2,1:1/2"
MOTZKIN = "-1:1/3,0:1/3,1:1/3"
STOKES = "-2:1,-1:3,1:1"


@pytest.mark.parametrize(
    "args",
    [
        ("analyze", "-p", DYCK),
        ("analyze", "-p", STOKES),
        ("enumerate", "-p", DYCK, "--n", "6", "--h", "2"),
        ("enumerate", "-p", MOTZKIN, "--n", "5", "--mode", "float"),
        ("tail", "-p", DYCK, "--n", "32", "--x", "1", "--order", "3", "--compare", "andre"),
        ("tail", "-p", "-1:1,0:1,1:1", "--n", "50", "--x", "0.8", "--order", "3", "--compare", "dp"),
        ("expand", "-p", DYCK, "--order", "3"),
        ("roots", "-p", DYCK, "--z", "0.5"),
        ("roots", "-p", STOKES, "--radius", "1e-4", "--samples", "48"),
        ("roots", "-p", DYCK, "--grid", "0.1,0.5,4"),
        ("roots", "-p", "-3:1/8,-2:1/6,1:17/24"),
        ("verify", "-p", MOTZKIN, "--suite", "wm-identity", "--n", "200"),
    ],
)
def test_output_validates_against_schema(args):
    payload = run_json(*args)
    jsonschema.validate(payload, load_schema(args[0]))


def test_every_subcommand_has_a_schema():
    for name in NAMES:
        schema = load_schema(name)
        jsonschema.Draft202012Validator.check_schema(schema)


def test_analyze_dyck_profile():
    prof = run_json("analyze", "-p", DYCK)["profile"]
    assert prof["period"] == 2
    assert prof["tau"] == "1.0" or float(prof["tau"]) == 1.0
    assert float(prof["rho"]) == 1.0
    assert float(prof["sigma2_tau"]) == 1.0


def test_tail_dyck_benchmark():
    out = run_json("tail", "-p", DYCK, "--n", "64", "--x", "1", "--order", "7", "--compare", "andre")
    assert out["h"] == 8
    assert float(out["abs_difference"]) < 1e-7


def test_periodic_suite_for_duchon():
    done = run_cli("verify", "-p", "2:1,-3:1", "--suite", "periodic")
    assert done.returncode == 0, done.stderr
    out = json.loads(done.stdout)
    assert out["passed"]
    names = {c["name"] for c in out["checks"]}
    assert {"vanishing_off_multiples", "rotation_identities"} <= names


def test_json_is_byte_identical_across_runs():
    args = ("verify", "-p", DYCK, "--suite", "series", "--order", "12", "--seed", "7")
    first = run_cli(*args)
    second = run_cli(*args)
    assert first.returncode == 0
    assert first.stdout == second.stdout


def test_seed_changes_random_suite():
    a = run_json("verify", "-p", DYCK, "--suite", "series", "--order", "8", "--seed", "1")
    b = run_json("verify", "-p", DYCK, "--suite", "series", "--order", "8", "--seed", "2")
    walks_a = [c["values"]["polynomial"] for c in a["checks"]]
    walks_b = [c["values"]["polynomial"] for c in b["checks"]]
    assert walks_a[0] == walks_b[0]
    assert walks_a[1:] != walks_b[1:]


def test_enumerate_csv():
    done = run_cli("enumerate", "-p", "-1:1,1:1", "--n", "2", "--format", "csv")
    assert done.returncode == 0
    rows = list(csv.reader(io.StringIO(done.stdout)))
    assert rows[0] == ["n", "j", "value"]
    assert ["2", "0", "2"] in rows


def test_expand_csv_header():
    done = run_cli("expand", "-p", DYCK, "--order", "1", "--format", "csv")
    rows = list(csv.reader(io.StringIO(done.stdout)))
    assert rows[0] == ["k", "kind", "he_index", "x_degree", "coefficient"]
    assert ["1", "monomial", "", "1", "-4.0"] in rows


@pytest.mark.parametrize(
    "args",
    [
        ("analyze", "-p", "1:1"),
        ("analyze", "-p", "garbage"),
        ("analyze", "-p", DYCK, "--bogus"),
        ("analyze", "-p", DYCK, "--precision", "2"),
        ("tail", "-p", DYCK, "--n", "64", "--x", "-1"),
        ("roots", "-p", DYCK, "--z", "0.5", "--radius", "0.1"),
        ("verify", "-p", DYCK, "--suite", "nonsense"),
        ("frobnicate",),
    ],
)
def test_usage_errors_exit_2(args):
    done = run_cli(*args)
    assert done.returncode == 2
    assert done.stdout == ""
    assert done.stderr


@pytest.mark.parametrize(
    "args",
    [
        ("tail", "-p", STOKES, "--n", "10", "--x", "1"),
        ("roots", "-p", STOKES),
        ("expand", "-p", "-3:1,3:1,9:1"),
    ],
)
def test_domain_errors_exit_1(args):
    done = run_cli(*args)
    assert done.returncode == 1
    assert "error" in done.stderr


def test_failed_verification_exits_1():
    done = run_cli("verify", "-p", MOTZKIN, "--suite", "rayleigh-scan", "--n", "100", "--x", "0.5")
    assert done.returncode == 1
    out = json.loads(done.stdout)
    jsonschema.validate(out, load_schema("verify"))
    assert out["passed"] is False


def test_version_flag():
    done = run_cli("--version")
    assert done.returncode == 0
    assert "0.1.0" in done.stdout
