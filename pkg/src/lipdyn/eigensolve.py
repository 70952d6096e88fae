"""Bound states of 1D potentials and batched 3x3 symmetric eigendecomposition."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from numba import njit

from .grid import SpatialGrid

# residual bound ||A v - lambda v|| <= tol * ||A|| before falling back to LAPACK
EIG3_TOL = 1e-13


class UnboundRequest(ValueError):
    """More bound states were requested than the potential supports."""

    def __init__(self, requested: int, available: int):
        self.requested = requested
        self.available = available
        super().__init__(f"requested {requested} bound states but only {available} lie below the edge")


@dataclass(frozen=True)
class BoundStateSet:
    """Lowest eigenpairs of a single-channel Hamiltonian on a grid.

    ``states`` has shape (count, n); each row is real and normalized so that
    sum(phi**2) * dr == 1.
    """

    energies: np.ndarray
    states: np.ndarray
    grid: SpatialGrid
    label: str = ""

    def __len__(self):
        return len(self.energies)


def kinetic_matrix(grid: SpatialGrid, mass: float) -> np.ndarray:
    """Dense spectral kinetic-energy matrix, exact for band-limited periodic functions."""
    eye = np.eye(grid.n)
    t = np.fft.ifft(np.fft.fft(eye, axis=0) * (grid.k**2 / (2.0 * mass))[:, None], axis=0)
    t = t.real
    return 0.5 * (t + t.T)


def _fix_sign(states: np.ndarray) -> np.ndarray:
    idx = np.argmax(np.abs(states), axis=1)
    signs = np.sign(states[np.arange(len(states)), idx])
    signs[signs == 0] = 1.0
    return states * signs[:, None]


def bound_states(potential: np.ndarray, grid: SpatialGrid, mass: float, count: int,
                 edge: float | None = None, label: str = "") -> BoundStateSet:
    """The ``count`` lowest eigenpairs of -1/(2m) d^2/dR^2 + V(R).

    Only states strictly below ``edge`` count as bound; by default the edge is
    the lower of the two end-point values of the potential.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    v = np.asarray(potential, dtype=float)
    if v.shape != (grid.n,):
        raise ValueError(f"potential has shape {v.shape}, grid has {grid.n} points")
    if edge is None:
        edge = min(v[0], v[-1])
    if count > grid.n:
        raise UnboundRequest(count, int(np.sum(scipy.linalg.eigvalsh(kinetic_matrix(grid, mass) + np.diag(v)) < edge)))
    h = kinetic_matrix(grid, mass)
    h[np.diag_indices_from(h)] += v
    energies, vecs = scipy.linalg.eigh(h, subset_by_index=[0, count - 1])
    if energies[-1] >= edge:
        raise UnboundRequest(count, int(np.sum(energies < edge)))
    states = _fix_sign(vecs.T / np.sqrt(grid.dr))
    return BoundStateSet(energies, states, grid, label)


@njit(cache=True)
def _eig3_point(a00, a01, a02, a11, a12, a22, vals, vecs, n):
    """Closed-form eigenpairs of one symmetric 3x3 matrix, written into vals[n]/vecs[n].

    Returns the max-abs residual of A V - V diag(vals).
    """
    # work on A / max|A_ij| so tiny or huge entries cannot under/overflow
    scale = max(abs(a00), abs(a01), abs(a02), abs(a11), abs(a12), abs(a22))
    if scale == 0.0:
        scale = 1.0
    a00 /= scale
    a01 /= scale
    a02 /= scale
    a11 /= scale
    a12 /= scale
    a22 /= scale
    q = (a00 + a11 + a22) / 3.0
    b00 = a00 - q
    b11 = a11 - q
    b22 = a22 - q
    off2 = a01 * a01 + a02 * a02 + a12 * a12
    p = np.sqrt((b00 * b00 + b11 * b11 + b22 * b22 + 2.0 * off2) / 6.0)
    if p < 1e-30:  # A = q I to far below working precision
        vals[n, 0] = vals[n, 1] = vals[n, 2] = q * scale
        for i in range(3):
            for j in range(3):
                vecs[n, i, j] = 1.0 if i == j else 0.0
        return 3.0 * p * scale
    det = b00 * (b11 * b22 - a12 * a12) - a01 * (a01 * b22 - a12 * a02) + a02 * (a01 * a12 - b11 * a02)
    r = det / (2.0 * p * p * p)
    r = min(1.0, max(-1.0, r))
    phi = np.arccos(r) / 3.0
    cphi = np.cos(phi)
    sphi = np.sqrt(max(0.0, 1.0 - cphi * cphi))
    lam_hi = q + 2.0 * p * cphi
    # cos(phi + 2 pi / 3)
    lam_lo = q + 2.0 * p * (-0.5 * cphi - 0.8660254037844386 * sphi)
    lam_mid = 3.0 * q - lam_hi - lam_lo

    # The eigenvalue farther from the middle one is well separated, so its
    # vector from a cross product of rows of (A - lam I) is accurate. The
    # remaining pair comes from a 2x2 Jacobi rotation in the complement.
    lam = lam_lo if (lam_mid - lam_lo) > (lam_hi - lam_mid) else lam_hi
    m00 = a00 - lam
    m11 = a11 - lam
    m22 = a22 - lam
    best = -1.0
    vx = 1.0
    vy = 0.0
    vz = 0.0
    for k in range(3):
        if k == 0:  # r0 x r1
            cx = a01 * a12 - a02 * m11
            cy = a02 * a01 - m00 * a12
            cz = m00 * m11 - a01 * a01
        elif k == 1:  # r0 x r2
            cx = a01 * m22 - a02 * a12
            cy = a02 * a02 - m00 * m22
            cz = m00 * a12 - a01 * a02
        else:  # r1 x r2
            cx = m11 * m22 - a12 * a12
            cy = a12 * a02 - a01 * m22
            cz = a01 * a12 - m11 * a02
        nrm = cx * cx + cy * cy + cz * cz
        if nrm > best:
            best = nrm
            vx = cx
            vy = cy
            vz = cz
    if best > 0.0:
        nv = np.sqrt(best)
        vx /= nv
        vy /= nv
        vz /= nv
    else:
        vx, vy, vz = 1.0, 0.0, 0.0

    ax, ay, az = abs(vx), abs(vy), abs(vz)
    if ax <= ay and ax <= az:  # v x e_x
        u1x, u1y, u1z = 0.0, vz, -vy
    elif ay <= az:  # v x e_y
        u1x, u1y, u1z = -vz, 0.0, vx
    else:  # v x e_z
        u1x, u1y, u1z = vy, -vx, 0.0
    nu = np.sqrt(u1x * u1x + u1y * u1y + u1z * u1z)
    u1x /= nu
    u1y /= nu
    u1z /= nu
    u2x = vy * u1z - vz * u1y
    u2y = vz * u1x - vx * u1z
    u2z = vx * u1y - vy * u1x

    au1x = a00 * u1x + a01 * u1y + a02 * u1z
    au1y = a01 * u1x + a11 * u1y + a12 * u1z
    au1z = a02 * u1x + a12 * u1y + a22 * u1z
    au2x = a00 * u2x + a01 * u2y + a02 * u2z
    au2y = a01 * u2x + a11 * u2y + a12 * u2z
    au2z = a02 * u2x + a12 * u2y + a22 * u2z
    c11 = u1x * au1x + u1y * au1y + u1z * au1z
    c22 = u2x * au2x + u2y * au2y + u2z * au2z
    c12 = u1x * au2x + u1y * au2y + u1z * au2z
    # Jacobi rotation zeroing c12
    if c12 == 0.0:
        c = 1.0
        s = 0.0
    else:
        tau = (c22 - c11) / (2.0 * c12)
        t = 1.0 / (abs(tau) + np.sqrt(1.0 + tau * tau))
        if tau > 0.0:
            t = -t
        c = 1.0 / np.sqrt(1.0 + t * t)
        s = t * c

    vecs[n, 0, 0], vecs[n, 1, 0], vecs[n, 2, 0] = vx, vy, vz
    vecs[n, 0, 1], vecs[n, 1, 1], vecs[n, 2, 1] = c * u1x + s * u2x, c * u1y + s * u2y, c * u1z + s * u2z
    vecs[n, 0, 2], vecs[n, 1, 2], vecs[n, 2, 2] = c * u2x - s * u1x, c * u2y - s * u1y, c * u2z - s * u1z
    for i in range(3):
        x, y, z = vecs[n, 0, i], vecs[n, 1, i], vecs[n, 2, i]
        vals[n, i] = (x * (a00 * x + a01 * y + a02 * z) + y * (a01 * x + a11 * y + a12 * z)
                   + z * (a02 * x + a12 * y + a22 * z))

    # insertion sort of three columns
    for i in range(1, 3):
        j = i
        while j > 0 and vals[n, j - 1] > vals[n, j]:
            vals[n, j - 1], vals[n, j] = vals[n, j], vals[n, j - 1]
            for row in range(3):
                vecs[n, row, j - 1], vecs[n, row, j] = vecs[n, row, j], vecs[n, row, j - 1]
            j -= 1

    res = 0.0
    for i in range(3):
        x, y, z = vecs[n, 0, i], vecs[n, 1, i], vecs[n, 2, i]
        res = max(res, abs(a00 * x + a01 * y + a02 * z - vals[n, i] * x))
        res = max(res, abs(a01 * x + a11 * y + a12 * z - vals[n, i] * y))
        res = max(res, abs(a02 * x + a12 * y + a22 * z - vals[n, i] * z))
    for i in range(3):
        vals[n, i] *= scale
    return res * scale


@njit(cache=True)
def _eig3_batch(a, tol, vals, vecs, bad):
    for n in range(a.shape[0]):
        scale = 0.0
        for i in range(3):
            for j in range(3):
                scale = max(scale, abs(a[n, i, j]))
        res = _eig3_point(a[n, 0, 0], a[n, 0, 1], a[n, 0, 2], a[n, 1, 1], a[n, 1, 2], a[n, 2, 2],
                          vals, vecs, n)
        bad[n] = res > tol * scale


def eig3_symmetric(matrix: np.ndarray, tol: float = EIG3_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors of real symmetric 3x3 matrices.

    Accepts a single (3, 3) matrix or a stack (n, 3, 3). Eigenvectors are the
    columns of the returned matrices. A closed-form solution is used; any
    matrix whose residual exceeds ``tol * max|A_ij|`` is redone with LAPACK.
    """
    a = np.ascontiguousarray(matrix, dtype=float)
    single = a.ndim == 2
    a = a.reshape(-1, 3, 3)
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix contains NaN or inf")
    vals = np.empty((len(a), 3))
    vecs = np.empty((len(a), 3, 3))
    bad = np.empty(len(a), dtype=np.bool_)
    _eig3_batch(a, tol, vals, vecs, bad)
    if np.any(bad):
        vals[bad], vecs[bad] = np.linalg.eigh(a[bad])
    if single:
        return vals[0], vecs[0]
    return vals, vecs


@dataclass(frozen=True)
class PointwiseEigenFrame:
    """Per-grid-point eigenvalues (n, 3) and eigenvector columns (n, 3, 3)."""

    values: np.ndarray
    vectors: np.ndarray


def eigenfield(matrices: np.ndarray, reference: np.ndarray | None = None) -> PointwiseEigenFrame:
    """Diagonalize a field of matrices and make eigenvector signs continuous along R.

    Each eigenvector is flipped so that its overlap with the same-index vector
    at the previous grid point is non-negative. ``reference`` optionally fixes
    the signs at the first point.
    """
    vals, vecs = eig3_symmetric(matrices)
    vecs = np.array(vecs, copy=True).reshape(-1, 3, 3)
    vals = vals.reshape(-1, 3)
    # local sign flips relative to the previous point, accumulated along R
    dots = np.einsum("nji,nji->ni", vecs[1:], vecs[:-1])
    flips = np.where(dots < 0, -1.0, 1.0)
    signs = np.concatenate([np.ones((1, 3)), np.cumprod(flips, axis=0)])
    if reference is not None:
        first = np.einsum("ji,ji->i", vecs[0], reference)
        signs *= np.where(first < 0, -1.0, 1.0)
    vecs *= signs[:, None, :]
    return PointwiseEigenFrame(vals, vecs)
