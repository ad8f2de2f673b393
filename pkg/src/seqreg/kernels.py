"""Dispatch facade over the numba / numpy kernel implementations."""

from __future__ import annotations

import numpy as np

from . import backend
from .errors import ConfigError

if backend.NUMBA_ENABLED:
    from . import _kernels_numba as _impl
else:
    from . import _kernels_numpy as _impl

SCHEMES = ("linear", "cubic")


def interp_values(values: np.ndarray, t1: np.ndarray, t2: np.ndarray, scheme: str) -> np.ndarray:
    """Sample ``values`` at continuous index coordinates (t1, t2)."""
    if scheme == "linear":
        return _impl.bilinear_values(values, t1, t2)
    if scheme == "cubic":
        return _impl.cubic_values(values, t1, t2)
    raise ConfigError(f"unknown interpolation scheme {scheme!r} (use linear or cubic)")


def interp_values_derivs(values: np.ndarray, t1: np.ndarray, t2: np.ndarray, scheme: str):
    """Sample and differentiate; derivatives are in index units."""
    if scheme == "linear":
        return _impl.bilinear_values_derivs(values, t1, t2)
    if scheme == "cubic":
        return _impl.cubic_values_derivs(values, t1, t2)
    raise ConfigError(f"unknown interpolation scheme {scheme!r} (use linear or cubic)")


def gram(a: np.ndarray) -> np.ndarray:
    """G = A^T A for a tall-skinny column matrix."""
    return _impl.gram(np.ascontiguousarray(a, dtype=np.float64))


def warmup() -> None:
    """Trigger JIT compilation of every kernel signature (no-op for numpy)."""
    v = np.array([[0.0, 1.0, 2.0], [1.0, 2.0, 3.0], [2.0, 3.0, 4.0]])
    t = np.array([0.3, 1.6])
    for scheme in SCHEMES:
        interp_values(v, t, t, scheme)
        interp_values_derivs(v, t, t, scheme)
    gram(np.ones((5, 2)))
