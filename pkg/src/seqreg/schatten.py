"""Spectral similarity of stacked normalized gradients.

The T normalized gradient fields of a sequence, flattened, form the columns
of a tall-skinny matrix A (dn x T).  Perfect alignment makes the columns
linearly dependent, collapsing the singular value spectrum; the measure is
the q-th power sum of the singular values (Schatten-q, a quasi-norm for
q < 1), smoothed for differentiability at sigma = 0.

The spectrum comes from the T x T Gram matrix G = A^T A instead of a
dn x T SVD: T is tens while dn is huge, and the gradient
A V diag(q (lambda_i + eps^2)^{(q-2)/2}) V^T never materializes the left
singular vectors.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ConfigError, SolverError
from .grid import ImageSequence, VectorField, gradient, gradient_adjoint, warp, warp_with_jacobian
from .ngf import (
    NgfParams,
    frame_thetas,
    normalize_gradient,
    normalize_gradient_jacobian_apply,
)

MAX_FRAMES = 64

# Eigenvalues this far below the largest one are numerical noise from the
# Jacobi sweeps; flooring them to zero keeps sqrt from amplifying rounding
# into spurious singular values (duplicate columns must collapse exactly).
RANK_FLOOR = 64.0 * np.finfo(np.float64).eps


@dataclass(frozen=True)
class GradientMatrix:
    """Columns are flattened normalized gradient fields, shape (dn, T)."""

    columns: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.columns, dtype=np.float64)
        if c.ndim != 2:
            raise ConfigError(f"gradient matrix must be 2D, got shape {c.shape}")
        object.__setattr__(self, "columns", c)

    @property
    def T_frames(self) -> int:
        return self.columns.shape[1]


@dataclass(frozen=True)
class SingularSystem:
    """Descending singular values with the right singular basis."""

    sigma: np.ndarray  # min(dn, T) values, descending
    right_vectors: np.ndarray  # V, T x T orthogonal
    gram_eigs: np.ndarray  # lambda_i = sigma_i^2, all T of them


@dataclass(frozen=True)
class SchattenParams:
    """Exponent q and the smoothing width eps.

    q = 0.5 follows the reference color-TV choice; eps > 0 is required for
    gradients whenever q < 2 because sigma^q has infinite slope at 0.
    """

    q: float = 0.5
    eps: float = 0.0

    def __post_init__(self):
        if self.q < 0:
            raise ConfigError(f"q must be >= 0, got {self.q}")
        if self.eps < 0:
            raise ConfigError(f"eps must be >= 0, got {self.eps}")


def _as_matrix(a) -> np.ndarray:
    if isinstance(a, GradientMatrix):
        return a.columns
    return np.asarray(a, dtype=np.float64)


def gram(a) -> np.ndarray:
    """G = A^T A (T x T, symmetric positive semi-definite)."""
    m = _as_matrix(a)
    if m.shape[1] < 2:
        raise ConfigError(f"need at least 2 columns, got {m.shape[1]}")
    return kernels.gram(m)


def jacobi_eigh(g: np.ndarray, tol: float = 1e-12, max_sweeps: int = 60):
    """Eigendecomposition of a small symmetric matrix by cyclic Jacobi sweeps.

    Rotations run in a fixed (row-cyclic) order until the off-diagonal
    Frobenius norm falls below ``tol`` times the Frobenius norm of the input.
    Returns (eigenvalues, V) unsorted; deterministic and dependency-free.
    """
    a = np.array(g, dtype=np.float64)
    t = a.shape[0]
    v = np.eye(t)
    norm = np.sqrt(np.sum(a * a))
    if norm == 0.0:
        return np.zeros(t), v
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(a * a) - np.sum(np.diag(a) ** 2))
        if off <= tol * norm:
            break
        for p in range(t - 1):
            for q in range(p + 1, t):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                if tau >= 0.0:
                    tstep = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    tstep = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + tstep * tstep)
                s = tstep * c
                app = a[p, p]
                aqq = a[q, q]
                a[p, p] = app - tstep * apq
                a[q, q] = aqq + tstep * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                for r in range(t):
                    if r != p and r != q:
                        arp = a[r, p]
                        arq = a[r, q]
                        a[r, p] = c * arp - s * arq
                        a[p, r] = a[r, p]
                        a[r, q] = s * arp + c * arq
                        a[q, r] = a[r, q]
                vp = v[:, p].copy()
                v[:, p] = c * vp - s * v[:, q]
                v[:, q] = s * vp + c * v[:, q]
    else:
        raise SolverError("Jacobi eigensolver did not converge")
    return np.diag(a).copy(), v


def spectrum(a) -> SingularSystem:
    """Singular system of A via the Gram matrix and the Jacobi eigensolver."""
    m = _as_matrix(a)
    dn, t = m.shape
    if t < 2:
        raise ConfigError(f"need at least 2 columns, got {t}")
    if t > MAX_FRAMES:
        raise ConfigError(f"{t} columns exceed the small-eigenproblem cap {MAX_FRAMES}")
    lam, v = jacobi_eigh(kernels.gram(m))
    order = np.argsort(lam)[::-1]
    lam = lam[order]
    v = v[:, order]
    lam = np.maximum(lam, 0.0)
    if lam[0] > 0.0:
        lam[lam < RANK_FLOOR * lam[0]] = 0.0
    # fix eigenvector signs: largest-magnitude entry positive
    for j in range(t):
        k = int(np.argmax(np.abs(v[:, j])))
        if v[k, j] < 0:
            v[:, j] = -v[:, j]
    sig = np.sqrt(lam[: min(dn, t)])
    return SingularSystem(sigma=sig, right_vectors=v, gram_eigs=lam)


def schatten_q(sys: SingularSystem, p: SchattenParams) -> float:
    """Smoothed q-power sum of the singular values.

    sum_i (sigma_i^2 + eps^2)^(q/2) - sum_i eps^q: calibrated so an all-zero
    matrix scores 0, and exactly sum sigma^q when eps = 0.
    """
    s2 = sys.sigma**2
    if p.eps == 0.0:
        return float(np.sum(np.where(s2 > 0.0, s2 ** (p.q / 2.0), 0.0)))
    return float(np.sum((s2 + p.eps**2) ** (p.q / 2.0)) - len(sys.sigma) * p.eps**p.q)


def schatten_q_gradient(a, sys: SingularSystem, p: SchattenParams) -> np.ndarray:
    """d/dA of :func:`schatten_q` composed with :func:`spectrum`.

    Equals A V diag(q (lambda_i + eps^2)^{(q-2)/2}) V^T, which is
    U diag(f'(sigma_i)) V^T without ever forming U.  For q = 2, eps = 0 this
    is exactly 2 A.
    """
    m = _as_matrix(a)
    if p.q <= 0:
        raise ConfigError("Schatten gradient needs q > 0")
    if p.q < 2 and p.eps == 0.0:
        raise ConfigError("Schatten gradient needs eps > 0 when q < 2 (non-smooth at 0)")
    if p.q == 2.0 and p.eps == 0.0:
        return 2.0 * m
    v = sys.right_vectors
    w = p.q * (sys.gram_eigs + p.eps**2) ** ((p.q - 2.0) / 2.0)
    return m @ (v * w) @ v.T


def eps_from_sigma(sigma1: float, rel: float = 1e-2, fallback: float = 1e-2) -> float:
    """Smoothing width proportional to the leading singular value."""
    return rel * sigma1 if sigma1 > 0 else fallback


@dataclass(frozen=True)
class SqnResult:
    value: float
    gradients: tuple[VectorField, ...]  # d value / d displacement, per frame
    sigma: np.ndarray
    warped: tuple  # the warped frames
    seconds_gram: float


def sqn_value_and_gradient(
    seq: ImageSequence,
    displacements: tuple[VectorField, ...] | list[VectorField],
    ngf_params: NgfParams,
    p: SchattenParams,
    scheme: str = "cubic",
    thetas: np.ndarray | None = None,
    want_gradient: bool = True,
) -> SqnResult:
    """Similarity value and per-frame displacement gradients.

    Each frame is warped by its displacement; the finite-difference gradients
    of the warped frames are normalized and stacked into A.  The chain rule
    walks back through the Schatten gradient, the (self-adjoint) node-wise
    normalization Jacobian, the transpose of the difference stencil, and the
    interpolant's spatial derivatives at the sample points.  Cost per call is
    O(n T^2 + T^3) plus O(n T) field work.
    """
    grid = seq.grid
    t_frames = len(seq)
    if len(displacements) != t_frames:
        raise ConfigError("one displacement per frame required")
    if thetas is None:
        thetas = frame_thetas(seq, ngf_params)

    warped = []
    interp_derivs = []
    grads = []
    etas = []
    dn = 2 * grid.n
    a = np.empty((dn, t_frames))
    for t in range(t_frames):
        if want_gradient:
            w_img, dw = warp_with_jacobian(seq[t], displacements[t], scheme)
            interp_derivs.append(dw)
        else:
            w_img = warp(seq[t], displacements[t], scheme)
        warped.append(w_img)
        g = gradient(w_img)
        grads.append(g)
        ng = normalize_gradient(g, float(thetas[t]), ngf_params.normalization)
        etas.append(ng)
        a[:, t] = ng.field.data.reshape(-1)

    t0 = time.perf_counter()
    sys = spectrum(a)
    seconds_gram = time.perf_counter() - t0
    value = schatten_q(sys, p)

    if not want_gradient:
        return SqnResult(value, tuple(), sys.sigma, tuple(warped), seconds_gram)

    ga = schatten_q_gradient(a, sys, p)
    out = []
    for t in range(t_frames):
        w_eta = VectorField(grid, ga[:, t].reshape(2, *grid.shape))
        z = normalize_gradient_jacobian_apply(
            grads[t], float(thetas[t]), w_eta, ngf_params.normalization
        )
        s_plane = gradient_adjoint(z)
        du = s_plane[None, :, :] * interp_derivs[t]
        out.append(VectorField(grid, du))
    return SqnResult(value, tuple(out), sys.sigma, tuple(warped), seconds_gram)
