"""Time the compiled hot kernels against the pure-Python fallback.

Usage: ``python benchmarks/bench_kernels.py [--repeat R]``.  Prints one
JSON object per kernel with the best wall time of each backend and the
speed-up.
"""
from __future__ import annotations

import argparse
import json
import timeit

import numpy as np

from bridgeheight import _pykernels, kernels

try:
    from bridgeheight import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def _dp_case():
    # Motzkin-like walk with jumps -2..2, long horizon
    w = np.array([0.1, 0.25, 0.3, 0.25, 0.1])
    return (w, 2, 2, 2000, 60)


def _aberth_case(degree: int = 40, seed: int = 0):
    rng = np.random.default_rng(seed)
    roots = rng.normal(size=degree) + 1j * rng.normal(size=degree)
    coeffs = np.poly(roots)[::-1].astype(complex)
    start = roots * (1 + 1e-3) + 1e-3j
    return coeffs, start


def bench(repeat: int) -> list[dict]:
    rows = []
    dp_args = _dp_case()
    coeffs, start = _aberth_case()
    cases = {
        "bridge_dp": lambda mod: mod.bridge_dp(*dp_args),
        "aberth_polish": lambda mod: mod.aberth_polish(coeffs, start.copy(), 1e-14, 100),
    }
    for name, call in cases.items():
        row = {"kernel": name}
        for label, mod in (("python", _pykernels), ("compiled", _ckernels)):
            if mod is None:
                row[label] = None
                continue
            row[label] = min(timeit.repeat(lambda m=mod: call(m), number=1, repeat=repeat))
        if row["compiled"]:
            row["speedup"] = row["python"] / row["compiled"]
        rows.append(row)
    return rows


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(json.dumps({"backends": kernels.available_backends()}))
    for row in bench(args.repeat):
        print(json.dumps(row, sort_keys=True))


if __name__ == "__main__":
    main()
