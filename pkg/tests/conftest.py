"""Shared helpers for the test suite."""
from __future__ import annotations

import json
import subprocess
import sys

import pytest


def run_cli(*args: str, check: bool = False) -> subprocess.CompletedProcess:
    """Run ``python -m bridgeheight`` with ``args`` in a fresh interpreter."""
    cmd = [sys.executable, "-m", "bridgeheight", *args]
    return subprocess.run(cmd, check=check, capture_output=True, text=True, timeout=300)


def run_json(*args: str) -> dict:
    done = run_cli(*args)
    assert done.returncode == 0, done.stderr
    return json.loads(done.stdout)


@pytest.fixture
def cli():
    return run_cli


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
