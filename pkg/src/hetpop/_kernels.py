"""Fused loops for the Monte-Carlo reference runs.

Each row of the uniform blocks is one reference run. A run turns its
uniforms into Box-Muller normals (cosine branch, zero draws guarded as
in stochastics), mixes them to the target correlation with the upper
Cholesky factor of [[1, r], [r, 1]], re-standardizes with the run's own
moments, whitens with the run's own correlation, and counts the cases
beyond 1 in absolute value on both components. Fusing the whole run
into one loop avoids materializing per-run matrices, which is what
makes full table reproductions tractable.

All arithmetic is strict IEEE double (no fastmath), so for a fixed
uniform block the outputs are bit-reproducible on any thread count.
"""

import numpy as np
from numba import njit

from hetpop.stochastics import TINY

TWO_PI = 2.0 * np.pi

# guard matching pca_stats.SINGULAR_TOL; a run this degenerate yields nan
_SING = 1e-8


@njit(cache=True, nogil=True)
def _kappa_one(y1, y2):
    n = y1.shape[0]
    s1 = 0.0
    s2 = 0.0
    s11 = 0.0
    s22 = 0.0
    s12 = 0.0
    for i in range(n):
        a = y1[i]
        b = y2[i]
        s1 += a
        s2 += b
        s11 += a * a
        s22 += b * b
        s12 += a * b
    m1 = s1 / n
    m2 = s2 / n
    v1 = (s11 - n * m1 * m1) / (n - 1)
    v2 = (s22 - n * m2 * m2) / (n - 1)
    if v1 <= 0.0 or v2 <= 0.0:
        return np.nan
    sd1 = np.sqrt(v1)
    sd2 = np.sqrt(v2)
    rr = (s12 - n * m1 * m2) / (n - 1) / (sd1 * sd2)
    if np.abs(rr) >= 1.0 - _SING:
        return np.nan
    scale_sum = np.sqrt(2.0 * (1.0 + rr))
    scale_diff = np.sqrt(2.0 * (1.0 - rr))
    count = 0
    for i in range(n):
        e1 = (y1[i] - m1) / sd1
        e2 = (y2[i] - m2) / sd2
        c_sum = np.abs((e1 + e2) / scale_sum)
        c_diff = np.abs((e1 - e2) / scale_diff)
        if c_sum > 1.0 and c_diff > 1.0:
            count += 1
    return count / n


@njit(cache=True, nogil=True)
def kappa_runs_parametric(u, v, r, out):
    """u, v: (runs, 2n) uniform blocks; out: (runs,) kappa values."""
    runs = u.shape[0]
    n = u.shape[1] // 2
    s = np.sqrt(1.0 - r * r)
    y1 = np.empty(n)
    y2 = np.empty(n)
    for k in range(runs):
        for i in range(n):
            ua = u[k, 2 * i]
            ub = u[k, 2 * i + 1]
            if ua <= 0.0:
                ua = TINY
            if ub <= 0.0:
                ub = TINY
            z1 = np.sqrt(-2.0 * np.log(ua)) * np.cos(TWO_PI * v[k, 2 * i])
            z2 = np.sqrt(-2.0 * np.log(ub)) * np.cos(TWO_PI * v[k, 2 * i + 1])
            y1[i] = z1
            y2[i] = r * z1 + s * z2
        out[k] = _kappa_one(y1, y2)


@njit(cache=True, nogil=True)
def kappa_runs_bootstrap(u, v, pool, r, out):
    """u, v: (runs, n) index uniforms; pool: standardized 2n-vector."""
    runs = u.shape[0]
    n = u.shape[1]
    size = pool.shape[0]
    s = np.sqrt(1.0 - r * r)
    y1 = np.empty(n)
    y2 = np.empty(n)
    for k in range(runs):
        for i in range(n):
            ia = int(u[k, i] * size)
            ib = int(v[k, i] * size)
            if ia >= size:
                ia = size - 1
            if ib >= size:
                ib = size - 1
            a = pool[ia]
            b = pool[ib]
            y1[i] = a
            y2[i] = r * a + s * b
        out[k] = _kappa_one(y1, y2)
