"""Split-operator propagation of the three-channel wavefunction.

One step of length dt is

    psi <- exp(-i V dt/2) exp(-i T dt) exp(-i V dt/2) psi

with V the 3x3 potential matrix at the midpoint time of the step. The
potential factor is applied exactly at every grid point through the
eigendecomposition of V; the kinetic factor is diagonal in k-space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.fft
from numba import njit

from .analysis import ScenarioResult, channel_populations, well_basis
from .eigensolve import EIG3_TOL, _eig3_point
from .grid import SpatialGrid, kinetic_phase
from .potentials import assemble
from .units import AU_TIME_IN_PS

# density within this many points of either edge is watched for contamination
EDGE_POINTS = 5
EDGE_THRESHOLD = 1e-6


class PropagationError(RuntimeError):
    """Non-finite values appeared in the wavefunction."""

    def __init__(self, step: int, t: float):
        self.step = step
        self.t = t
        super().__init__(f"non-finite wavefunction at step {step} (t = {t * AU_TIME_IN_PS:.6f} ps)")


@dataclass
class ChannelWavefunction:
    """Channel amplitudes ``psi[i, j]`` = Psi_i(R_j) for i in (X, A, Pi), at time ``t`` (a.u.)."""

    psi: np.ndarray
    grid: SpatialGrid
    t: float = 0.0

    @property
    def t_ps(self) -> float:
        return self.t * AU_TIME_IN_PS

    def norm(self) -> float:
        return float(np.sum(np.abs(self.psi) ** 2) * self.grid.dr)

    def copy(self) -> "ChannelWavefunction":
        return ChannelWavefunction(self.psi.copy(), self.grid, self.t)


@dataclass(frozen=True)
class PropagationSettings:
    """Time window and recording schedule, in atomic units."""

    dt: float
    t_start: float
    t_end: float
    record_stride: int = 1
    snapshot_times: tuple = ()

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.t_end < self.t_start:
            raise ValueError("t_end must not precede t_start")
        if self.record_stride < 1:
            raise ValueError("record_stride must be >= 1")

    @property
    def n_steps(self) -> int:
        # final partial step allowed
        return int(math.ceil((self.t_end - self.t_start) / self.dt - 1e-9))

    def step_times(self) -> np.ndarray:
        """Times at the end of each step."""
        t = self.t_start + self.dt * np.arange(1, self.n_steps + 1)
        if len(t):
            t[-1] = self.t_end
        return t


def initial_state(cp, grid: SpatialGrid, mass: float, well: str, nu: int) -> ChannelWavefunction:
    """The nu-th field-free vibrational state of a well, placed in its channel."""
    basis = well_basis(cp, grid, mass, well, nu + 1)
    psi = np.zeros((3, grid.n), dtype=complex)
    psi[0 if well == "left" else 2] = basis.states[nu]
    return ChannelWavefunction(psi, grid, 0.0)


@njit(cache=True)
def _potential_factors(mats, tau, out):
    """out[j] = exp(-i tau V_j) for each 3x3 matrix V_j, stored as (U00, U01, U02, U11, U12, U22)."""
    vals = np.empty((1, 3))
    vecs = np.empty((1, 3, 3))
    for j in range(mats.shape[0]):
        a = mats[j]
        res = _eig3_point(a[0, 0], a[0, 1], a[0, 2], a[1, 1], a[1, 2], a[2, 2], vals, vecs, 0)
        scale = 0.0
        for p in range(3):
            for q in range(3):
                scale = max(scale, abs(a[p, q]))
        if res > EIG3_TOL * scale:
            w, v = np.linalg.eigh(a)
            vals[0] = w
            vecs[0] = v
        e0 = np.exp(-1j * tau * vals[0, 0])
        e1 = np.exp(-1j * tau * vals[0, 1])
        e2 = np.exp(-1j * tau * vals[0, 2])
        v = vecs[0]
        k = 0
        for p in range(3):
            for q in range(p, 3):
                out[j, k] = v[p, 0] * v[q, 0] * e0 + v[p, 1] * v[q, 1] * e1 + v[p, 2] * v[q, 2] * e2
                k += 1


@njit(cache=True)
def _apply_factors(u, psi):
    finite = True
    for j in range(psi.shape[1]):
        p0 = psi[0, j]
        p1 = psi[1, j]
        p2 = psi[2, j]
        psi[0, j] = u[j, 0] * p0 + u[j, 1] * p1 + u[j, 2] * p2
        psi[1, j] = u[j, 1] * p0 + u[j, 3] * p1 + u[j, 4] * p2
        psi[2, j] = u[j, 2] * p0 + u[j, 4] * p1 + u[j, 5] * p2
        if not (np.isfinite(psi[0, j].real) and np.isfinite(psi[1, j].real) and np.isfinite(psi[2, j].real)):
            finite = False
    return finite


def potential_exponential(matrices: np.ndarray, tau: float) -> np.ndarray:
    """exp(-i tau V) for a stack of real symmetric 3x3 matrices, as full (n, 3, 3) arrays."""
    mats = np.ascontiguousarray(matrices, dtype=float).reshape(-1, 3, 3)
    packed = np.empty((len(mats), 6), dtype=complex)
    _potential_factors(mats, tau, packed)
    full = packed[:, [0, 1, 2, 1, 3, 4, 2, 4, 5]].reshape(-1, 3, 3)
    return full


class SplitOperator:
    """Reusable stepper for one potential, grid and mass.

    ``potential`` is any object with ``matrix_field(r, t) -> (n, 3, 3)``; if it
    also has ``diagonals`` and ``couplings`` (as :class:`CoupledPotential`
    does) the time-independent diagonal is evaluated once.
    """

    def __init__(self, potential, grid: SpatialGrid, mass: float, workers: int = 1):
        self.potential = potential
        self.grid = grid
        self.mass = mass
        self.workers = workers
        self._kin_cache: dict[float, np.ndarray] = {}
        self._diag = None
        if hasattr(potential, "diagonals") and hasattr(potential, "couplings"):
            self._diag = potential.diagonals(grid.r)
        self._u = np.empty((grid.n, 6), dtype=complex)

    def matrices(self, t: float) -> np.ndarray:
        if self._diag is not None:
            return assemble(self._diag, *self.potential.couplings(t))
        return np.ascontiguousarray(self.potential.matrix_field(self.grid.r, t), dtype=float)

    def kinetic(self, dt: float) -> np.ndarray:
        k = self._kin_cache.get(dt)
        if k is None:
            if len(self._kin_cache) > 8:
                self._kin_cache.clear()
            k = self._kin_cache[dt] = kinetic_phase(self.grid, self.mass, dt)
        return k

    def step(self, psi: np.ndarray, t: float, dt: float, step_index: int = 0) -> np.ndarray:
        """Advance ``psi`` (3, n) in place from t to t + dt and return it."""
        _potential_factors(self.matrices(t + 0.5 * dt), 0.5 * dt, self._u)
        ok = _apply_factors(self._u, psi)
        phi = scipy.fft.fft(psi, axis=1, workers=self.workers)
        phi *= self.kinetic(dt)
        psi[:] = scipy.fft.ifft(phi, axis=1, workers=self.workers)
        ok &= _apply_factors(self._u, psi)
        if not ok:
            raise PropagationError(step_index, t + dt)
        return psi


def step(psi: ChannelWavefunction, cp, grid: SpatialGrid, mass: float, dt: float) -> ChannelWavefunction:
    """One split-operator step; returns a new wavefunction."""
    out = psi.copy()
    SplitOperator(cp, grid, mass).step(out.psi, psi.t, dt)
    out.t = psi.t + dt
    return out


def edge_density(psi: np.ndarray, grid: SpatialGrid) -> float:
    """Total probability within EDGE_POINTS grid points of either end."""
    dens = np.sum(np.abs(psi) ** 2, axis=0) * grid.dr
    return float(dens[:EDGE_POINTS].sum() + dens[-EDGE_POINTS:].sum())


Observer = Callable[[float, np.ndarray], None]


def propagate(psi0: ChannelWavefunction, cp, grid: SpatialGrid, mass: float,
              settings: PropagationSettings, observers: Sequence[Observer] = (),
              workers: int = 1, progress: Callable[[int, int], None] | None = None) -> ScenarioResult:
    """Propagate from settings.t_start to settings.t_end, recording observables.

    Populations and the norm are recorded at t_start, every ``record_stride``
    steps and at t_end. Full wavefunctions are stored at the steps nearest to
    each requested snapshot time and at the end. ``observers`` are called as
    ``observer(t, psi)`` at each recording point.
    """
    stepper = SplitOperator(cp, grid, mass, workers=workers)
    psi = np.array(psi0.psi, dtype=complex, copy=True)
    n_steps = settings.n_steps
    ends = settings.step_times()
    snap_steps = {}
    for ts in settings.snapshot_times:
        k = int(round((ts - settings.t_start) / settings.dt))
        snap_steps.setdefault(min(max(k, 0), n_steps), []).append(ts)

    result = ScenarioResult(grid=grid)
    contaminated = False

    def record(k: int, t: float):
        nonlocal contaminated
        result.times.append(t)
        pops = channel_populations(psi, grid)
        result.populations.append(pops)
        result.norm.append(float(sum(pops)))
        if edge_density(psi, grid) > EDGE_THRESHOLD:
            contaminated = True
        for obs in observers:
            obs(t, psi)

    t = settings.t_start
    record(0, t)
    if 0 in snap_steps:
        result.snapshots.append((t, psi.copy()))
    for k in range(1, n_steps + 1):
        t_next = ends[k - 1]
        stepper.step(psi, t, t_next - t, step_index=k)
        t = t_next
        if k % settings.record_stride == 0 or k == n_steps:
            record(k, t)
        if k in snap_steps:
            result.snapshots.append((t, psi.copy()))
        if progress is not None:
            progress(k, n_steps)
    result.final = ChannelWavefunction(psi, grid, t)
    result.boundary_contaminated = contaminated
    return result


def brute_force_step(psi: ChannelWavefunction, cp, grid: SpatialGrid, mass: float, dt: float) -> ChannelWavefunction:
    """Exact exponential of the full 3n x 3n Hamiltonian frozen at the midpoint time.

    Test oracle. The kinetic operator is built from an explicit DFT matrix,
    independently of the FFT path used by :func:`step`.
    """
    import scipy.linalg

    n = grid.n
    if n > 128:
        raise ValueError("brute_force_step is limited to grids of at most 128 points")
    j = np.arange(n)
    dft = np.exp(-2j * np.pi * np.outer(j, j) / n)
    kin = (dft.conj().T @ np.diag(grid.k**2 / (2.0 * mass)) @ dft) / n
    v = cp.matrix_field(grid.r, psi.t + 0.5 * dt)
    h = np.zeros((3 * n, 3 * n), dtype=complex)
    for a in range(3):
        h[a * n:(a + 1) * n, a * n:(a + 1) * n] += kin
        for b in range(3):
            h[a * n + j, b * n + j] += v[:, a, b]
    u = scipy.linalg.expm(-1j * dt * h)
    out = (u @ psi.psi.reshape(-1)).reshape(3, n)
    return ChannelWavefunction(out, grid, psi.t + dt)
