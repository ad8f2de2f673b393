"""Discrete images on regular cell-centered grids.

A grid of size (m1, m2) with spacing (h1, h2) covers the world rectangle
[o1, o1 + m1*h1] x [o2, o2 + m2*h2]; node k along an axis sits at
origin + (k + 1/2) * h.  Images and vector fields are immutable value
holders over such grids; all operations are pure functions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import ConfigError, DataError


@dataclass(frozen=True)
class Grid:
    """Cell-centered regular 2D grid."""

    shape: tuple[int, int]
    spacing: tuple[float, float] = (1.0, 1.0)
    origin: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        m1, m2 = self.shape
        h1, h2 = self.spacing
        if m1 < 2 or m2 < 2:
            raise DataError(f"grid must be at least 2x2, got {m1}x{m2}")
        if not (h1 > 0 and h2 > 0):
            raise DataError(f"grid spacing must be positive, got {self.spacing}")

    @property
    def n(self) -> int:
        return self.shape[0] * self.shape[1]

    def node_coords(self) -> tuple[np.ndarray, np.ndarray]:
        """World coordinates of all nodes, as two (m1, m2) planes."""
        m1, m2 = self.shape
        h1, h2 = self.spacing
        x1 = self.origin[0] + (np.arange(m1) + 0.5) * h1
        x2 = self.origin[1] + (np.arange(m2) + 0.5) * h2
        return np.broadcast_to(x1[:, None], self.shape).copy(), np.broadcast_to(
            x2[None, :], self.shape
        ).copy()

    def coarsened(self) -> "Grid":
        """Grid with each axis halved (ceil), covering the same world domain."""
        m1, m2 = self.shape
        c1, c2 = (m1 + 1) // 2, (m2 + 1) // 2
        return Grid(
            shape=(c1, c2),
            spacing=(self.spacing[0] * m1 / c1, self.spacing[1] * m2 / c2),
            origin=self.origin,
        )


def _check_finite(arr: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(arr)):
        raise DataError(f"{what} contains non-finite values")


@dataclass(frozen=True)
class Image:
    """Scalar image: one float64 value per grid node, row-major."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.shape != self.grid.shape:
            raise DataError(
                f"image values shape {v.shape} does not match grid {self.grid.shape}"
            )
        _check_finite(v, "image")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class VectorField:
    """Two component planes over a grid; used for gradients and displacements."""

    grid: Grid
    data: np.ndarray = field(repr=False)  # shape (2, m1, m2)

    def __post_init__(self):
        d = np.asarray(self.data, dtype=np.float64)
        if d.shape != (2, *self.grid.shape):
            raise DataError(
                f"vector field shape {d.shape} does not match (2, *{self.grid.shape})"
            )
        _check_finite(d, "vector field")
        d = d.copy()
        d.setflags(write=False)
        object.__setattr__(self, "data", d)

    @classmethod
    def zeros(cls, grid: Grid) -> "VectorField":
        return cls(grid, np.zeros((2, *grid.shape)))

    def norms(self) -> np.ndarray:
        """Euclidean vector length at every node."""
        return np.sqrt(self.data[0] ** 2 + self.data[1] ** 2)


@dataclass(frozen=True)
class ImageSequence:
    """Ordered frames sharing one grid."""

    frames: tuple[Image, ...]

    def __post_init__(self):
        frames = tuple(self.frames)
        if len(frames) < 2:
            raise DataError(f"an image sequence needs at least 2 frames, got {len(frames)}")
        g = frames[0].grid
        for k, fr in enumerate(frames):
            if fr.grid != g:
                raise DataError(f"frame grid mismatch at frame {k}: {fr.grid} vs {g}")
        object.__setattr__(self, "frames", frames)

    @property
    def grid(self) -> Grid:
        return self.frames[0].grid

    def __len__(self) -> int:
        return len(self.frames)

    def __iter__(self):
        return iter(self.frames)

    def __getitem__(self, t: int) -> Image:
        return self.frames[t]


@dataclass(frozen=True)
class DeformationStack:
    """One displacement field per frame, all on the same grid."""

    fields: tuple[VectorField, ...]

    def __post_init__(self):
        fields = tuple(self.fields)
        if not fields:
            raise DataError("deformation stack needs at least one field")
        g = fields[0].grid
        for k, f in enumerate(fields):
            if f.grid != g:
                raise DataError(f"field grid mismatch at frame {k}")
        object.__setattr__(self, "fields", fields)

    @classmethod
    def zeros(cls, grid: Grid, count: int) -> "DeformationStack":
        return cls(tuple(VectorField.zeros(grid) for _ in range(count)))

    @classmethod
    def from_array(cls, grid: Grid, arr: np.ndarray) -> "DeformationStack":
        return cls(tuple(VectorField(grid, a) for a in arr.reshape(-1, 2, *grid.shape)))

    def as_array(self) -> np.ndarray:
        return np.stack([f.data for f in self.fields])

    @property
    def grid(self) -> Grid:
        return self.fields[0].grid

    def __len__(self) -> int:
        return len(self.fields)

    def __iter__(self):
        return iter(self.fields)

    def __getitem__(self, t: int) -> VectorField:
        return self.fields[t]


# ---------------------------------------------------------------------------
# finite differences


def gradient(image: Image) -> VectorField:
    """Spatial gradient: central differences inside, one-sided at the boundary.

    Component k is scaled by 1/h_k.  The operator is linear in the image
    values; :func:`gradient_adjoint` applies its transpose.
    """
    v = image.values
    h1, h2 = image.grid.spacing
    g = np.empty((2, *v.shape))
    g[0, 1:-1, :] = (v[2:, :] - v[:-2, :]) / (2.0 * h1)
    g[0, 0, :] = (v[1, :] - v[0, :]) / h1
    g[0, -1, :] = (v[-1, :] - v[-2, :]) / h1
    g[1, :, 1:-1] = (v[:, 2:] - v[:, :-2]) / (2.0 * h2)
    g[1, :, 0] = (v[:, 1] - v[:, 0]) / h2
    g[1, :, -1] = (v[:, -1] - v[:, -2]) / h2
    return VectorField(image.grid, g)


def _gradient_adjoint_axis(w: np.ndarray, h: float, axis: int) -> np.ndarray:
    if axis == 1:
        return _gradient_adjoint_axis(w.T, h, 0).T
    out = np.zeros_like(w)
    # interior stencil rows contribute -/+ 1/(2h) to the flanking nodes
    out[:-2, :] -= w[1:-1, :] / (2.0 * h)
    out[2:, :] += w[1:-1, :] / (2.0 * h)
    # one-sided boundary rows
    out[0, :] -= w[0, :] / h
    out[1, :] += w[0, :] / h
    out[-2, :] -= w[-1, :] / h
    out[-1, :] += w[-1, :] / h
    return out


def gradient_adjoint(field: VectorField) -> np.ndarray:
    """Transpose of :func:`gradient` as a map from fields to value planes."""
    h1, h2 = field.grid.spacing
    return _gradient_adjoint_axis(field.data[0], h1, 0) + _gradient_adjoint_axis(
        field.data[1], h2, 1
    )


# ---------------------------------------------------------------------------
# interpolation and warping


def _index_coords(grid: Grid, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    p = np.asarray(points, dtype=np.float64)
    t1 = (p[:, 0] - grid.origin[0]) / grid.spacing[0] - 0.5
    t2 = (p[:, 1] - grid.origin[1]) / grid.spacing[1] - 0.5
    return np.ascontiguousarray(t1), np.ascontiguousarray(t2)


def interpolate(image: Image, points: np.ndarray, scheme: str = "linear") -> np.ndarray:
    """Evaluate the image interpolant at world points (N, 2), clamping to the edge."""
    t1, t2 = _index_coords(image.grid, points)
    return kernels.interp_values(image.values, t1, t2, scheme)


def interpolate_with_jacobian(
    image: Image, points: np.ndarray, scheme: str = "linear"
) -> tuple[np.ndarray, np.ndarray]:
    """Values and exact spatial derivatives of the interpolant at world points.

    Returns ``(values, derivs)`` with ``derivs`` of shape (N, 2) in world
    units.  Where a point is clamped to the domain edge the derivative across
    the clamp direction is zero (the extension is constant there).
    """
    t1, t2 = _index_coords(image.grid, points)
    vals, d1, d2 = kernels.interp_values_derivs(image.values, t1, t2, scheme)
    h1, h2 = image.grid.spacing
    return vals, np.stack([d1 / h1, d2 / h2], axis=1)


def warp(image: Image, displacement: VectorField, scheme: str = "linear") -> Image:
    """Resample: output(x) = image interpolated at x + u(x)."""
    if displacement.grid != image.grid:
        raise DataError("displacement grid does not match image grid")
    x1, x2 = image.grid.node_coords()
    pts = np.stack(
        [(x1 + displacement.data[0]).ravel(), (x2 + displacement.data[1]).ravel()], axis=1
    )
    vals = interpolate(image, pts, scheme)
    return Image(image.grid, vals.reshape(image.grid.shape))


def warp_with_jacobian(
    image: Image, displacement: VectorField, scheme: str = "linear"
) -> tuple[Image, np.ndarray]:
    """Warped image plus interpolant derivatives at the sample points (2, m1, m2)."""
    if displacement.grid != image.grid:
        raise DataError("displacement grid does not match image grid")
    x1, x2 = image.grid.node_coords()
    pts = np.stack(
        [(x1 + displacement.data[0]).ravel(), (x2 + displacement.data[1]).ravel()], axis=1
    )
    vals, derivs = interpolate_with_jacobian(image, pts, scheme)
    shape = image.grid.shape
    d = np.stack([derivs[:, 0].reshape(shape), derivs[:, 1].reshape(shape)])
    return Image(image.grid, vals.reshape(shape)), d


# ---------------------------------------------------------------------------
# multilevel transfer


def _block_average(v: np.ndarray) -> np.ndarray:
    m1, m2 = v.shape
    i0 = np.arange(0, m1, 2)
    j0 = np.arange(0, m2, 2)
    s = np.add.reduceat(np.add.reduceat(v, i0, axis=0), j0, axis=1)
    c1 = np.minimum(i0 + 2, m1) - i0
    c2 = np.minimum(j0 + 2, m2) - j0
    return s / np.outer(c1, c2)


def restrict(image: Image) -> Image:
    """Halve each axis (ceil) by 2x2 block averaging.

    Exactly mean-preserving for even axis sizes; odd trailing blocks average
    the cells they actually contain.
    """
    m1, m2 = image.grid.shape
    if m1 < 4 or m2 < 4:
        raise ConfigError(f"cannot restrict a {m1}x{m2} grid; need at least 4 per axis")
    return Image(image.grid.coarsened(), _block_average(image.values))


def restrict_field(fld: VectorField) -> VectorField:
    """Component-wise block-average restriction of a vector field."""
    m1, m2 = fld.grid.shape
    if m1 < 4 or m2 < 4:
        raise ConfigError(f"cannot restrict a {m1}x{m2} grid; need at least 4 per axis")
    coarse = fld.grid.coarsened()
    return VectorField(
        coarse, np.stack([_block_average(fld.data[0]), _block_average(fld.data[1])])
    )


def prolong(fld: VectorField, fine_grid: Grid) -> VectorField:
    """Bilinear prolongation of a (coarse) field onto a finer grid.

    Displacement values are in world units, so they transfer unchanged;
    prolong(restrict(.)) reproduces globally linear fields at interior nodes.
    """
    x1, x2 = fine_grid.node_coords()
    pts = np.stack([x1.ravel(), x2.ravel()], axis=1)
    planes = []
    for k in range(2):
        comp = Image(fld.grid, fld.data[k])
        planes.append(interpolate(comp, pts, "linear").reshape(fine_grid.shape))
    return VectorField(fine_grid, np.stack(planes))
