"""NumPy implementations of the hot kernels.

These are the fallback used when the compiled extension is unavailable;
both implementations share signatures and are cross-checked in tests.
"""
from __future__ import annotations

import math

import numpy as np


def bridge_dp(weights, c: int, d: int, n: int, h: int) -> tuple[float, float]:
    """Weight of length-``n`` bridges whose altitude never exceeds ``h``.

    Parameters
    ----------
    weights : array of float, length ``c + d + 1``
        ``weights[j + c]`` is the weight of jump ``j``.
    h : int
        Ceiling; a negative value means no ceiling.

    Returns
    -------
    (mantissa, log_scale)
        The bridge weight is ``mantissa * exp(log_scale)``.
    """
    w = np.asarray(weights, dtype=np.float64)
    if h < 0:
        h = d * n
    pad = max(c, d)
    base = c * n + pad
    size = (c + d) * n + 2 * pad + 1
    cur = np.zeros(size)
    cur[base] = 1.0
    log_scale = 0.0
    for s in range(1, n + 1):
        lo = max(-c * s, -d * (n - s))
        hi = min(d * s, c * (n - s), h)
        new = np.zeros(size)
        if lo <= hi:
            a, b = base + lo, base + hi + 1
            for k in range(c + d + 1):
                wk = w[k]
                if wk != 0.0:
                    j = k - c
                    new[a:b] += wk * cur[a - j:b - j]
        m = new.max() if lo <= hi else 0.0
        if m <= 0.0:
            return 0.0, 0.0
        new /= m
        log_scale += math.log(m)
        cur = new
    return float(cur[base]), log_scale


def aberth_polish(coeffs, roots, tol: float, max_iter: int):
    """Simultaneous Newton (Aberth) refinement of all polynomial roots.

    ``coeffs`` are complex, lowest degree first.  Returns
    ``(roots, iterations, converged)``.
    """
    a = np.asarray(coeffs, dtype=np.complex128)[::-1]
    da = np.polyder(a)
    z = np.array(roots, dtype=np.complex128)
    n = z.size
    for it in range(1, max_iter + 1):
        pz = np.polyval(a, z)
        dpz = np.polyval(da, z)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        inv = 1.0 / diff
        np.fill_diagonal(inv, 0.0)
        s = inv.sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = pz / dpz
            step = ratio / (1.0 - ratio * s)
        step = np.where(np.isfinite(step), step, 0.0)
        z = z - step
        if np.all(np.abs(step) <= tol * np.maximum(np.abs(z), 1e-300)):
            return z, it, True
    return z, max_iter, n == 0
