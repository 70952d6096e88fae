"""Observables: populations, vibrational projections, LIP following, transfer reports."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.signal import find_peaks

from .eigensolve import BoundStateSet, UnboundRequest, bound_states
from .grid import SpatialGrid
from .potentials import WELLS, well_potential
from .units import AU_TIME_IN_PS

# residual oscillation is measured over this final window
RESIDUAL_WINDOW_PS = 5.0


@dataclass
class ScenarioResult:
    """Recorded time series of one propagation.

    ``populations[k]`` holds (P_X, P_A, P_Pi) at ``times[k]`` (atomic units).
    ``snapshots`` is a list of (t, psi) with psi of shape (3, n).
    """

    grid: SpatialGrid
    times: list = field(default_factory=list)
    populations: list = field(default_factory=list)
    norm: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)
    final: Any = None
    boundary_contaminated: bool = False
    metadata: dict = field(default_factory=dict)

    @property
    def times_ps(self) -> np.ndarray:
        return np.asarray(self.times) * AU_TIME_IN_PS

    @property
    def population_array(self) -> np.ndarray:
        return np.asarray(self.populations).reshape(-1, 3)


def channel_populations(psi, grid: SpatialGrid) -> tuple[float, float, float]:
    """(P_X, P_A, P_Pi) = sum_j |Psi_i(R_j)|^2 dr."""
    psi = getattr(psi, "psi", psi)
    p = np.sum(psi.real**2 + psi.imag**2, axis=1) * grid.dr
    return float(p[0]), float(p[1]), float(p[2])


def well_basis(cp, grid: SpatialGrid, mass: float, well: str, count: int) -> BoundStateSet:
    """Field-free vibrational states of the left (X) or right (dressed Pi) well."""
    return bound_states(well_potential(cp, grid.r, well), grid, mass, count, label=well)


def vibrational_projection(psi, basis: BoundStateSet, channel: int) -> np.ndarray:
    """Weights |<phi_nu | Psi_channel>|^2 for every state of ``basis``."""
    psi = getattr(psi, "psi", psi)
    if psi.shape[-1] != basis.grid.n:
        raise ValueError("wavefunction and basis live on different grids")
    amps = basis.states @ psi[channel] * basis.grid.dr
    return np.abs(amps) ** 2


def density_snapshot(psi, grid: SpatialGrid | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Channel densities |Psi_i(R)|^2, shape (3, n), and their sum."""
    psi = getattr(psi, "psi", psi)
    dens = psi.real**2 + psi.imag**2
    return dens, dens.sum(axis=0)


def count_peaks(density: np.ndarray, prominence: float = 0.05) -> int:
    """Number of local maxima whose prominence is at least ``prominence`` times the global max."""
    density = np.asarray(density)
    peaks, _ = find_peaks(density, prominence=prominence * density.max())
    return len(peaks)


def lip_following(psi, cp, grid: SpatialGrid, mass: float, t: float, count: int) -> np.ndarray:
    """Weights of the full wavefunction on the bound states of the active light-induced potential.

    The three channel amplitudes are rotated pointwise into the adiabatic
    frame; the active-surface component is then projected on the states.
    """
    from .lip import active_spectrum, lip_at

    psi = getattr(psi, "psi", psi)
    surface = lip_at(cp, grid, t)
    component = np.einsum("ji,ij->j", surface.active_vectors, psi)
    spectrum = active_spectrum(cp, grid, mass, t, count, surface=surface)
    return np.abs(spectrum.states @ component * grid.dr) ** 2


@dataclass
class TransferReport:
    initial: tuple
    final: tuple
    final_weight: float
    final_populations: tuple
    residual_oscillation: float
    weights: dict = field(default_factory=dict)

    @property
    def final_well_population(self) -> float:
        return self.final_populations[WELLS[self.final[0]]]


def final_weights(psi, cp, grid: SpatialGrid, mass: float, max_nu: int = 12) -> dict:
    """Projection weights on every field-free (well, nu) state up to ``max_nu``."""
    weights = {}
    for well in ("left", "right"):
        count = max_nu
        while True:
            try:
                basis = well_basis(cp, grid, mass, well, count)
                break
            except UnboundRequest as exc:
                if exc.available == 0:
                    raise
                count = exc.available
        w = vibrational_projection(psi, basis, WELLS[well])
        for nu, value in enumerate(w):
            weights[(well, nu)] = float(value)
    return weights


def transfer_report(result: ScenarioResult, cp, grid: SpatialGrid, mass: float,
                    initial: tuple = ("left", 0), max_nu: int = 12) -> TransferReport:
    """Dominant final (well, nu) label, its weight, and residual population oscillation."""
    if result.final is None:
        raise ValueError("result has no final wavefunction")
    weights = final_weights(result.final, cp, grid, mass, max_nu)
    final = max(weights, key=weights.get)
    pops = channel_populations(result.final, grid)

    times = result.times_ps
    window = times >= times[-1] - RESIDUAL_WINDOW_PS
    target = result.population_array[window, WELLS[final[0]]]
    residual = float(target.max() - target.min()) if target.size else 0.0
    return TransferReport(tuple(initial), final, weights[final], pops, residual, weights)
