"""Numba implementations of the hot kernels.

All functions take continuous *index* coordinates (node k sits at index k)
and return derivatives in index units; the caller converts to world units.
Sampling clamps to the node hull [0, m-1] per axis (edge extension); the
derivative along a clamped axis is zero there.  Every output element is
written by exactly one thread, so results do not depend on the thread count.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange


@njit(cache=True, parallel=True)
def bilinear_values(values, t1, t2):
    m1, m2 = values.shape
    n = t1.shape[0]
    out = np.empty(n, dtype=np.float64)
    for i in prange(n):
        x = min(max(t1[i], 0.0), m1 - 1.0)
        y = min(max(t2[i], 0.0), m2 - 1.0)
        j1 = min(int(x), m1 - 2)
        j2 = min(int(y), m2 - 2)
        f1 = x - j1
        f2 = y - j2
        v00 = values[j1, j2]
        v01 = values[j1, j2 + 1]
        v10 = values[j1 + 1, j2]
        v11 = values[j1 + 1, j2 + 1]
        out[i] = (1.0 - f1) * ((1.0 - f2) * v00 + f2 * v01) + f1 * (
            (1.0 - f2) * v10 + f2 * v11
        )
    return out


@njit(cache=True, parallel=True)
def bilinear_values_derivs(values, t1, t2):
    m1, m2 = values.shape
    n = t1.shape[0]
    out = np.empty(n, dtype=np.float64)
    d1 = np.empty(n, dtype=np.float64)
    d2 = np.empty(n, dtype=np.float64)
    for i in prange(n):
        c1 = t1[i] <= 0.0 or t1[i] >= m1 - 1.0
        c2 = t2[i] <= 0.0 or t2[i] >= m2 - 1.0
        x = min(max(t1[i], 0.0), m1 - 1.0)
        y = min(max(t2[i], 0.0), m2 - 1.0)
        j1 = min(int(x), m1 - 2)
        j2 = min(int(y), m2 - 2)
        f1 = x - j1
        f2 = y - j2
        v00 = values[j1, j2]
        v01 = values[j1, j2 + 1]
        v10 = values[j1 + 1, j2]
        v11 = values[j1 + 1, j2 + 1]
        out[i] = (1.0 - f1) * ((1.0 - f2) * v00 + f2 * v01) + f1 * (
            (1.0 - f2) * v10 + f2 * v11
        )
        d1[i] = 0.0 if c1 else (1.0 - f2) * (v10 - v00) + f2 * (v11 - v01)
        d2[i] = 0.0 if c2 else (1.0 - f1) * (v01 - v00) + f1 * (v11 - v10)
    return out, d1, d2


@njit(cache=True, inline="always")
def _cr_weights(f):
    # Catmull-Rom (interpolating cubic) weights for nodes j-1, j, j+1, j+2.
    f2 = f * f
    f3 = f2 * f
    w0 = -0.5 * f + f2 - 0.5 * f3
    w1 = 1.0 - 2.5 * f2 + 1.5 * f3
    w2 = 0.5 * f + 2.0 * f2 - 1.5 * f3
    w3 = -0.5 * f2 + 0.5 * f3
    return w0, w1, w2, w3


@njit(cache=True, inline="always")
def _cr_dweights(f):
    f2 = f * f
    d0 = -0.5 + 2.0 * f - 1.5 * f2
    d1 = -5.0 * f + 4.5 * f2
    d2 = 0.5 + 4.0 * f - 4.5 * f2
    d3 = -f + 1.5 * f2
    return d0, d1, d2, d3


@njit(cache=True, parallel=True)
def cubic_values(values, t1, t2):
    m1, m2 = values.shape
    n = t1.shape[0]
    out = np.empty(n, dtype=np.float64)
    for i in prange(n):
        x = min(max(t1[i], 0.0), m1 - 1.0)
        y = min(max(t2[i], 0.0), m2 - 1.0)
        j1 = min(int(x), m1 - 2)
        j2 = min(int(y), m2 - 2)
        f1 = x - j1
        f2 = y - j2
        w1a, w1b, w1c, w1d = _cr_weights(f1)
        w2a, w2b, w2c, w2d = _cr_weights(f2)
        acc = 0.0
        for a in range(4):
            i1 = min(max(j1 - 1 + a, 0), m1 - 1)
            if a == 0:
                wa = w1a
            elif a == 1:
                wa = w1b
            elif a == 2:
                wa = w1c
            else:
                wa = w1d
            row = (
                w2a * values[i1, min(max(j2 - 1, 0), m2 - 1)]
                + w2b * values[i1, j2]
                + w2c * values[i1, j2 + 1]
                + w2d * values[i1, min(j2 + 2, m2 - 1)]
            )
            acc += wa * row
        out[i] = acc
    return out


@njit(cache=True, parallel=True)
def cubic_values_derivs(values, t1, t2):
    m1, m2 = values.shape
    n = t1.shape[0]
    out = np.empty(n, dtype=np.float64)
    d1 = np.empty(n, dtype=np.float64)
    d2 = np.empty(n, dtype=np.float64)
    for i in prange(n):
        c1 = t1[i] <= 0.0 or t1[i] >= m1 - 1.0
        c2 = t2[i] <= 0.0 or t2[i] >= m2 - 1.0
        x = min(max(t1[i], 0.0), m1 - 1.0)
        y = min(max(t2[i], 0.0), m2 - 1.0)
        j1 = min(int(x), m1 - 2)
        j2 = min(int(y), m2 - 2)
        f1 = x - j1
        f2 = y - j2
        w1a, w1b, w1c, w1d = _cr_weights(f1)
        w2a, w2b, w2c, w2d = _cr_weights(f2)
        g1a, g1b, g1c, g1d = _cr_dweights(f1)
        g2a, g2b, g2c, g2d = _cr_dweights(f2)
        val = 0.0
        dd1 = 0.0
        dd2 = 0.0
        for a in range(4):
            i1 = min(max(j1 - 1 + a, 0), m1 - 1)
            if a == 0:
                wa, ga = w1a, g1a
            elif a == 1:
                wa, ga = w1b, g1b
            elif a == 2:
                wa, ga = w1c, g1c
            else:
                wa, ga = w1d, g1d
            vA = values[i1, min(max(j2 - 1, 0), m2 - 1)]
            vB = values[i1, j2]
            vC = values[i1, j2 + 1]
            vD = values[i1, min(j2 + 2, m2 - 1)]
            row = w2a * vA + w2b * vB + w2c * vC + w2d * vD
            drow = g2a * vA + g2b * vB + g2c * vC + g2d * vD
            val += wa * row
            dd1 += ga * row
            dd2 += wa * drow
        out[i] = val
        d1[i] = 0.0 if c1 else dd1
        d2[i] = 0.0 if c2 else dd2
    return out, d1, d2


@njit(cache=True, parallel=True)
def gram(a):
    # G = A^T A, each entry a serial fixed-order dot product.
    n, t = a.shape
    g = np.empty((t, t), dtype=np.float64)
    npairs = t * (t + 1) // 2
    for k in prange(npairs):
        # decode upper-triangle pair (i, j), i <= j
        i = 0
        rem = k
        row = t
        while rem >= row:
            rem -= row
            row -= 1
            i += 1
        j = i + rem
        acc = 0.0
        for r in range(n):
            acc += a[r, i] * a[r, j]
        g[i, j] = acc
        g[j, i] = acc
    return g
