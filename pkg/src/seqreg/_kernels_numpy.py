"""Pure-numpy fallback kernels, vectorized over sample points.

Mirrors the numba module: index coordinates in, index-unit derivatives out,
clamp-to-edge sampling with zero derivative along clamped axes.
"""

from __future__ import annotations

import numpy as np


def _prep_axis(t, m):
    clamped = (t <= 0.0) | (t >= m - 1.0)
    x = np.clip(t, 0.0, m - 1.0)
    j = np.minimum(x.astype(np.int64), m - 2)
    f = x - j
    return j, f, clamped


def bilinear_values(values, t1, t2):
    m1, m2 = values.shape
    j1, f1, _ = _prep_axis(t1, m1)
    j2, f2, _ = _prep_axis(t2, m2)
    v00 = values[j1, j2]
    v01 = values[j1, j2 + 1]
    v10 = values[j1 + 1, j2]
    v11 = values[j1 + 1, j2 + 1]
    return (1.0 - f1) * ((1.0 - f2) * v00 + f2 * v01) + f1 * (
        (1.0 - f2) * v10 + f2 * v11
    )


def bilinear_values_derivs(values, t1, t2):
    m1, m2 = values.shape
    j1, f1, c1 = _prep_axis(t1, m1)
    j2, f2, c2 = _prep_axis(t2, m2)
    v00 = values[j1, j2]
    v01 = values[j1, j2 + 1]
    v10 = values[j1 + 1, j2]
    v11 = values[j1 + 1, j2 + 1]
    vals = (1.0 - f1) * ((1.0 - f2) * v00 + f2 * v01) + f1 * (
        (1.0 - f2) * v10 + f2 * v11
    )
    d1 = np.where(c1, 0.0, (1.0 - f2) * (v10 - v00) + f2 * (v11 - v01))
    d2 = np.where(c2, 0.0, (1.0 - f1) * (v01 - v00) + f1 * (v11 - v10))
    return vals, d1, d2


def _cr_weights(f):
    f2 = f * f
    f3 = f2 * f
    return np.stack(
        [
            -0.5 * f + f2 - 0.5 * f3,
            1.0 - 2.5 * f2 + 1.5 * f3,
            0.5 * f + 2.0 * f2 - 1.5 * f3,
            -0.5 * f2 + 0.5 * f3,
        ],
        axis=-1,
    )


def _cr_dweights(f):
    f2 = f * f
    return np.stack(
        [
            -0.5 + 2.0 * f - 1.5 * f2,
            -5.0 * f + 4.5 * f2,
            0.5 + 4.0 * f - 4.5 * f2,
            -f + 1.5 * f2,
        ],
        axis=-1,
    )


def _cubic_gather(values, t1, t2):
    m1, m2 = values.shape
    j1, f1, c1 = _prep_axis(t1, m1)
    j2, f2, c2 = _prep_axis(t2, m2)
    offs = np.arange(-1, 3)
    i1 = np.clip(j1[:, None] + offs[None, :], 0, m1 - 1)
    i2 = np.clip(j2[:, None] + offs[None, :], 0, m2 - 1)
    patch = values[i1[:, :, None], i2[:, None, :]]  # (n, 4, 4)
    return patch, f1, f2, c1, c2


def cubic_values(values, t1, t2):
    patch, f1, f2, _, _ = _cubic_gather(values, t1, t2)
    w1 = _cr_weights(f1)
    w2 = _cr_weights(f2)
    return np.einsum("na,nab,nb->n", w1, patch, w2)


def cubic_values_derivs(values, t1, t2):
    patch, f1, f2, c1, c2 = _cubic_gather(values, t1, t2)
    w1 = _cr_weights(f1)
    w2 = _cr_weights(f2)
    g1 = _cr_dweights(f1)
    g2 = _cr_dweights(f2)
    vals = np.einsum("na,nab,nb->n", w1, patch, w2)
    d1 = np.where(c1, 0.0, np.einsum("na,nab,nb->n", g1, patch, w2))
    d2 = np.where(c2, 0.0, np.einsum("na,nab,nb->n", w1, patch, g2))
    return vals, d1, d2


def gram(a):
    return a.T @ a
