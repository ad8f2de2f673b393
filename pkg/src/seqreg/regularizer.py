"""Curvature regularization of displacement fields.

S(u) = (alpha/2) h1 h2 sum_nodes |Lap u|^2 with a Neumann (zero-flux)
five-point Laplacian.  Second-order smoothing leaves the affine part of a
deformation unpenalized in the interior, which suits displacements that sit
on top of a linear pre-alignment.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError
from .grid import VectorField


def laplacian(plane: np.ndarray, h1: float, h2: float) -> np.ndarray:
    """Five-point Laplacian with zero-flux boundary (ghost = edge value).

    The resulting matrix is symmetric, so the operator is its own adjoint.
    """
    p1 = np.pad(plane, ((1, 1), (0, 0)), mode="edge")
    p2 = np.pad(plane, ((0, 0), (1, 1)), mode="edge")
    return (p1[:-2, :] + p1[2:, :] - 2.0 * plane) / (h1 * h1) + (
        p2[:, :-2] + p2[:, 2:] - 2.0 * plane
    ) / (h2 * h2)


def curvature_value_and_gradient(
    u: VectorField, alpha: float
) -> tuple[float, VectorField]:
    """Value and gradient of the curvature penalty.

    gradient = alpha h1 h2 Lap(Lap u) per component (the Laplacian is
    self-adjoint under the Neumann stencil).
    """
    if alpha <= 0:
        raise ConfigError(f"alpha must be > 0, got {alpha}")
    h1, h2 = u.grid.spacing
    cell = h1 * h2
    lap = np.stack(
        [laplacian(u.data[0], h1, h2), laplacian(u.data[1], h1, h2)]
    )
    value = 0.5 * alpha * cell * float(np.sum(lap * lap))
    grad = alpha * cell * np.stack(
        [laplacian(lap[0], h1, h2), laplacian(lap[1], h1, h2)]
    )
    return value, VectorField(u.grid, grad)
