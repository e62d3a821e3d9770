# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels; see ``_pykernels`` for docs."""
from libc.math cimport log
from libc.stdlib cimport calloc, free

import numpy as np


def bridge_dp(weights, int c, int d, int n, long h):
    cdef double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    if h < 0:
        h = <long>d * n
    cdef int pad = c if c > d else d
    cdef long base = <long>c * n + pad
    cdef long size = <long>(c + d) * n + 2 * pad + 1
    cdef double *cur = <double *>calloc(size, sizeof(double))
    cdef double *new = <double *>calloc(size, sizeof(double))
    cdef double *tmp
    cdef double log_scale = 0.0, m, wk, acc
    cdef long s, lo, hi, i, plo = 0, phi = 0
    cdef int k, j
    if cur == NULL or new == NULL:
        free(cur)
        free(new)
        raise MemoryError()
    cur[base] = 1.0
    try:
        for s in range(1, n + 1):
            lo = -c * s
            if -d * (n - s) > lo:
                lo = -d * (n - s)
            hi = d * s
            if c * (n - s) < hi:
                hi = c * (n - s)
            if h < hi:
                hi = h
            if lo > hi:
                return 0.0, 0.0
            m = 0.0
            for i in range(base + lo, base + hi + 1):
                acc = 0.0
                for k in range(c + d + 1):
                    wk = w[k]
                    if wk != 0.0:
                        acc += wk * cur[i - (k - c)]
                new[i] = acc
                if acc > m:
                    m = acc
            # clear the previous window so stale values never leak
            for i in range(base + plo, base + phi + 1):
                cur[i] = 0.0
            if m <= 0.0:
                return 0.0, 0.0
            for i in range(base + lo, base + hi + 1):
                new[i] /= m
            log_scale += log(m)
            tmp = cur
            cur = new
            new = tmp
            plo = lo
            phi = hi
        return cur[base], log_scale
    finally:
        free(cur)
        free(new)


def aberth_polish(coeffs, roots, double tol, int max_iter):
    cdef double complex[::1] a = np.ascontiguousarray(coeffs, dtype=np.complex128)
    z_arr = np.array(roots, dtype=np.complex128)
    cdef double complex[::1] z = z_arr
    cdef int n = z.shape[0]
    cdef int deg = a.shape[0] - 1
    cdef int it, i, j, k
    cdef double complex p, dp, s, ratio, step
    cdef bint done
    for it in range(1, max_iter + 1):
        done = True
        for i in range(n):
            p = a[deg]
            dp = 0
            for k in range(deg - 1, -1, -1):
                dp = dp * z[i] + p
                p = p * z[i] + a[k]
            s = 0
            for j in range(n):
                if j != i:
                    s = s + 1.0 / (z[i] - z[j])
            if dp == 0:
                continue
            ratio = p / dp
            step = ratio / (1.0 - ratio * s)
            if step != step:
                continue
            z[i] = z[i] - step
            if abs(step) > tol * max(abs(z[i]), 1e-300):
                done = False
        if done:
            return z_arr, it, True
    return z_arr, max_iter, n == 0
