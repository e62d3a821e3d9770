"""Exact dynamic-programming enumeration of walks and bridges.

This module is the ground truth for every asymptotic formula in the
package.  Two arithmetic modes are offered:

``exact``
    Weights are scaled by their common denominator ``D`` so the table is
    filled with Python integers; ``f_{n,j}`` is the integer divided by
    ``D**n``.
``float``
    Double precision with per-step renormalization; values are returned
    as ``mantissa * exp(log_scale)`` internally so long scans do not
    underflow.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .errors import MemoryGuardError, ParityError
from .walk import JumpPolynomial

DEFAULT_MEMORY_CAP = 50_000_000
EXACT_DEFAULT_MAX_N = 512


def _resolve_mode(mode: str | None, n: int) -> str:
    if mode is None or mode == "auto":
        return "exact" if n <= EXACT_DEFAULT_MAX_N else "float"
    if mode not in ("exact", "float"):
        raise ValueError(f"unknown mode {mode!r}")
    return mode


def _integer_weights(poly: JumpPolynomial) -> tuple[dict[int, int], int]:
    den = math.lcm(*(w.denominator for _, w in poly.weights))
    return {j: int(w * den) for j, w in poly.weights}, den


@dataclass(frozen=True)
class CountTable:
    """Weights ``f_{n,j}`` of walks of length ``n`` ending at altitude ``j``.

    Attributes
    ----------
    mode : str
        ``"exact"`` or ``"float"``.
    ceiling : int or None
        Walks are constrained to stay at or below the ceiling.
    offsets : tuple of int
        ``offsets[n]`` is the lowest stored altitude of row ``n``.
    rows : tuple
        Integer numerators (exact) or float arrays.
    denominator : int
        Exact mode: the per-step denominator ``D``.
    """

    poly: JumpPolynomial
    mode: str
    ceiling: int | None
    offsets: tuple[int, ...]
    rows: tuple
    denominator: int = 1

    @property
    def n_max(self) -> int:
        return len(self.rows) - 1

    def value(self, n: int, j: int):
        """``f_{n,j}`` as a Fraction (exact) or float."""
        lo = self.offsets[n]
        row = self.rows[n]
        k = j - lo
        if k < 0 or k >= len(row):
            return Fraction(0) if self.mode == "exact" else 0.0
        if self.mode == "exact":
            return Fraction(row[k], self.denominator**n)
        return float(row[k])

    def row(self, n: int) -> dict[int, object]:
        """Non-zero entries of row ``n`` as ``{altitude: value}``."""
        out = {}
        lo = self.offsets[n]
        for k in range(len(self.rows[n])):
            v = self.value(n, lo + k)
            if v:
                out[lo + k] = v
        return out

    def row_sum(self, n: int):
        if self.mode == "exact":
            return Fraction(sum(self.rows[n]), self.denominator**n)
        return float(np.sum(self.rows[n]))

    def records(self):
        """Yield ``(n, j, value)`` for every stored non-zero entry."""
        for n in range(len(self.rows)):
            for j, v in self.row(n).items():
                yield n, j, v

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "j", "value"])
        for n, j, v in self.records():
            w.writerow([n, j, _render(v)])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {
            "polynomial": self.poly.text(),
            "mode": self.mode,
            "ceiling": self.ceiling,
            "n_max": self.n_max,
            "entries": [[n, j, _render(v)] for n, j, v in self.records()],
        }


def _render(v) -> str:
    if isinstance(v, Fraction):
        return str(v)
    return repr(float(v))


def count_table(
    poly: JumpPolynomial,
    n_max: int,
    ceiling: int | None = None,
    mode: str | None = None,
    memory_cap: int = DEFAULT_MEMORY_CAP,
) -> CountTable:
    """Fill ``f_{n+1}(u) = f_n(u) P(u)``, dropping terms above the ceiling.

    Examples
    --------
    >>> from bridgeheight.walk import parse_polynomial
    >>> count_table(parse_polynomial("-1:1/2,1:1/2"), 4).value(4, 0)
    Fraction(3, 8)
    """
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    if ceiling is not None and ceiling < 0:
        raise ValueError("ceiling must be non-negative")
    mode = _resolve_mode(mode, n_max)
    c, d = poly.c, poly.d
    entries = sum(
        (min(d * n, ceiling) if ceiling is not None else d * n) + c * n + 1
        for n in range(n_max + 1)
    )
    if entries > memory_cap:
        raise MemoryGuardError(f"table would hold {entries} entries (cap {memory_cap})")
    offsets = [0]
    if mode == "exact":
        iw, den = _integer_weights(poly)
        rows: list = [[1]]
        for n in range(1, n_max + 1):
            lo = -c * n
            hi = d * n if ceiling is None else min(d * n, ceiling)
            prev, plo = rows[-1], offsets[-1]
            new = [0] * (hi - lo + 1)
            for k, v in enumerate(prev):
                if v:
                    a = plo + k
                    for j, wj in iw.items():
                        t = a + j
                        if t <= hi:
                            new[t - lo] += v * wj
            rows.append(new)
            offsets.append(lo)
        return CountTable(poly, mode, ceiling, tuple(offsets), tuple(rows), den)
    w = [(j, float(x)) for j, x in poly.weights]
    rows = [np.ones(1)]
    for n in range(1, n_max + 1):
        lo = -c * n
        hi = d * n if ceiling is None else min(d * n, ceiling)
        prev, plo = rows[-1], offsets[-1]
        new = np.zeros(hi - lo + 1)
        for j, wj in w:
            # prev altitude a lands at a + j
            a0 = plo + j
            s = max(a0, lo)
            e = min(a0 + len(prev) - 1, hi)
            if s <= e:
                new[s - lo:e - lo + 1] += wj * prev[s - a0:e - a0 + 1]
        rows.append(new)
        offsets.append(lo)
    return CountTable(poly, mode, ceiling, tuple(offsets), tuple(rows), 1)


# -- bridges ----------------------------------------------------------------
def _exact_bridges(poly: JumpPolynomial, n: int, h: int | None) -> Fraction:
    """Bridges of length n staying at or below h, with return-window pruning."""
    iw, den = _integer_weights(poly)
    c, d = poly.c, poly.d
    cur = {0: 1}
    for s in range(1, n + 1):
        lo = max(-c * s, -d * (n - s))
        hi = min(d * s, c * (n - s))
        if h is not None:
            hi = min(hi, h)
        new: dict[int, int] = {}
        for a, v in cur.items():
            for j, wj in iw.items():
                t = a + j
                if lo <= t <= hi:
                    new[t] = new.get(t, 0) + v * wj
        cur = new
        if not cur:
            return Fraction(0)
    return Fraction(cur.get(0, 0), den**n)


def _float_bridges_log(poly: JumpPolynomial, n: int, h: int | None) -> tuple[float, float]:
    c, d = poly.c, poly.d
    total = float(poly.total_weight())
    w = np.zeros(c + d + 1)
    for j, x in poly.weights:
        w[j + c] = float(x) / total
    m, ls = kernels.bridge_dp(w, c, d, n, -1 if h is None else h)
    return m, ls + n * math.log(total)


def bounded_bridge_weight(poly: JumpPolynomial, n: int, h: int | None, mode: str | None = None):
    """Weight of length-``n`` bridges whose maximum is at most ``h``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if h is not None and h < 0:
        return Fraction(0) if _resolve_mode(mode, n) == "exact" else 0.0
    mode = _resolve_mode(mode, n)
    if mode == "exact":
        return _exact_bridges(poly, n, h)
    m, ls = _float_bridges_log(poly, n, h)
    return m * math.exp(ls) if m else 0.0


def unbounded_bridge_count(poly: JumpPolynomial, n: int, mode: str | None = None):
    """``V_n = [u^0] P(u)^n``."""
    return bounded_bridge_weight(poly, n, None, mode)


def bridge_tail(poly: JumpPolynomial, n: int, h: int, mode: str | None = None):
    """Weight of length-``n`` bridges whose maximum strictly exceeds ``h``."""
    if h < 0:
        raise ValueError("h must be non-negative")
    mode = _resolve_mode(mode, n)
    if h >= poly.d * n:
        return Fraction(0) if mode == "exact" else 0.0
    total = unbounded_bridge_count(poly, n, mode)
    return total - bounded_bridge_weight(poly, n, h, mode)


def bridge_tail_ratio(poly: JumpPolynomial, n: int, h: int, mode: str | None = None):
    """Conditional tail ``b_n^{>h} / b_n^{<inf}`` (0 when no bridge exists)."""
    mode = _resolve_mode(mode, n)
    if mode == "exact":
        total = unbounded_bridge_count(poly, n, mode)
        if total == 0:
            return Fraction(0)
        return (total - bounded_bridge_weight(poly, n, h, mode)) / total
    mt, lt = _float_bridges_log(poly, n, None)
    if mt == 0.0:
        return 0.0
    mb, lb = _float_bridges_log(poly, n, h)
    return 1.0 - (mb / mt) * math.exp(lb - lt) if mb else 1.0


def bridge_tail_series(poly: JumpPolynomial, n_max: int, h: int, mode: str | None = None) -> list:
    """``[b_n^{>h} for n in 0..n_max]`` from one pair of tables."""
    free = count_table(poly, n_max, None, mode)
    capped = count_table(poly, n_max, h, free.mode)
    return [free.value(n, 0) - capped.value(n, 0) for n in range(n_max + 1)]


def andre_reflection(m: int, h: int) -> Fraction:
    """Probability that a uniform +-1 bridge of length ``m`` reaches ``h``.

    Equal to ``C(m, m/2 + h) / C(m, m/2)``.
    """
    if m < 0 or m % 2:
        raise ParityError(f"length must be a non-negative even integer, got {m}")
    if not 0 <= h <= m // 2:
        raise ParityError(f"height must lie in [0, {m // 2}], got {h}")
    return Fraction(math.comb(m, m // 2 + h), math.comb(m, m // 2))
