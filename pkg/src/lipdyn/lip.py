"""Light-induced potentials and the time-dependent spectrum of the active surface.

At fixed time the 3x3 potential matrix is diagonalized at every R. The
active surface is the adiabatic surface that, at low energy, carries the
double well formed by the X curve on the left and the dressed Pi curve on
the right. Its vibrational states are followed in time by overlap
continuity, which separates diabatic passages of avoided crossings (the
state keeps its character and swaps sorted rank) from adiabatic ones.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .eigensolve import BoundStateSet, PointwiseEigenFrame, bound_states, eigenfield
from .grid import SpatialGrid

OVERLAP_THRESHOLD = 0.5
AMBIGUITY = 1e-3


@dataclass(frozen=True)
class LipSurface:
    """Adiabatic surfaces at one time.

    ``values[j]`` are the ascending eigenvalues at grid point j,
    ``vectors[j][:, i]`` the matching eigenvectors (sign-continuous in R), and
    ``active_index[j]`` the column that belongs to the active surface.
    """

    t: float
    values: np.ndarray
    vectors: np.ndarray
    active_index: np.ndarray

    @property
    def active(self) -> np.ndarray:
        return np.take_along_axis(self.values, self.active_index[:, None], axis=1)[:, 0]

    @property
    def active_vectors(self) -> np.ndarray:
        """(n, 3) eigenvectors of the active surface."""
        return np.take_along_axis(self.vectors, self.active_index[:, None, None], axis=2)[:, :, 0]


def active_rank(diagonals: np.ndarray) -> int:
    """Sorted index of the active surface, from the field-free diagonals (n, 3).

    At each R the double-well curve is min(U_X, U_Pi'); its rank among the
    three diagonal entries is 1 where the dressed A curve lies below it and 0
    otherwise. The rank taken is the majority over the points where the
    double-well curve lies below its lower edge value, so the active surface
    is a single continuous adiabatic surface.
    """
    well = np.minimum(diagonals[:, 0], diagonals[:, 2])
    rank = (diagonals[:, 1] < well).astype(int)
    bound = well < min(well[0], well[-1])
    if not np.any(bound):
        bound = np.ones_like(bound)
    return int(np.bincount(rank[bound], minlength=2).argmax())


def lip_at(cp, grid: SpatialGrid, t: float) -> LipSurface:
    frame: PointwiseEigenFrame = eigenfield(cp.matrix_field(grid.r, t))
    idx = np.full(grid.n, active_rank(cp.diagonals(grid.r)), dtype=int)
    return LipSurface(t, frame.values, frame.vectors, idx)


def active_spectrum(cp, grid: SpatialGrid, mass: float, t: float, count: int,
                    surface: LipSurface | None = None) -> BoundStateSet:
    """Lowest ``count`` vibrational states of the active surface at time ``t``.

    States must lie below the active surface at both grid edges.
    """
    if surface is None:
        surface = lip_at(cp, grid, t)
    return bound_states(surface.active, grid, mass, count, label="active")


@dataclass
class CrossingEvent:
    """Two tracked states exchanged sorted rank between consecutive samples.

    ``state_b`` is 0 when the partner is an untracked state. ``ambiguous``
    marks assignments whose best two overlaps were within AMBIGUITY.
    """

    t: float
    state_a: int
    state_b: int
    min_gap: float
    ambiguous: bool = False


@dataclass
class EigenTrajectorySet:
    """Overlap-continuous energy trajectories of the active-surface states.

    ``energies[k, i]`` is the energy of trajectory i (label i + 1) at
    ``times[k]``; ``ranks[k, i]`` its sorted index there.
    """

    times: np.ndarray
    energies: np.ndarray
    ranks: np.ndarray
    events: list = field(default_factory=list)
    snapshots: dict = field(default_factory=dict)
    sorted_energies: np.ndarray | None = None

    def events_for(self, label: int) -> list:
        return [e for e in self.events if label in (e.state_a, e.state_b)]


def track_trajectories(cp, grid: SpatialGrid, mass: float, times, count: int,
                       snapshot_times=(), threshold: float = OVERLAP_THRESHOLD,
                       extra: int = 2, workers: int = 1) -> EigenTrajectorySet:
    """Follow the ``count`` lowest active-surface states through ``times``.

    At each sample the tracked states are matched to the ``count + extra``
    lowest current states by maximizing total absolute overlap. A trajectory
    whose sorted rank changes produces a :class:`CrossingEvent`. Spectra at
    different times are independent and may be computed by ``workers``
    threads; matching is sequential, so the result does not depend on it.
    """
    times = np.asarray(times, dtype=float)
    if np.any(np.diff(times) <= 0):
        raise ValueError("times must be strictly ascending")
    pool = count + extra

    def spectrum(t):
        return active_spectrum(cp, grid, mass, t, pool)

    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            spectra = list(ex.map(spectrum, times))
    else:
        spectra = [spectrum(t) for t in times]

    snap_idx = {int(np.argmin(np.abs(times - ts))): ts for ts in snapshot_times}
    energies = np.empty((len(times), count))
    ranks = np.empty((len(times), count), dtype=int)
    sorted_e = np.array([s.energies for s in spectra])
    events: list[CrossingEvent] = []
    snapshots = {}

    assign = np.arange(count)
    current = spectra[0].states[:count].copy()
    for k, spec in enumerate(spectra):
        if k > 0:
            overlap = np.abs(current @ spec.states.T) * grid.dr
            rows, cols = linear_sum_assignment(-overlap)
            new_assign = cols[np.argsort(rows)]
            ambiguous = set()
            for i in range(count):
                top = np.sort(overlap[i])[::-1]
                if len(top) > 1 and top[0] - top[1] < AMBIGUITY:
                    ambiguous.add(i)
            moved = [i for i in range(count) if new_assign[i] != assign[i]]
            done = set()
            for i in moved:
                if i in done:
                    continue
                lo, hi = sorted((assign[i], new_assign[i]))
                # partner: the tracked state that took i's rank, if any
                partner = [j for j in moved if j != i and j not in done and new_assign[j] == assign[i]]
                j = partner[0] if partner else None
                gaps = np.concatenate([np.diff(sorted_e[k - 1, lo:hi + 1]), np.diff(sorted_e[k, lo:hi + 1])])
                events.append(CrossingEvent(
                    times[k], i + 1, 0 if j is None else j + 1, float(gaps.min()),
                    i in ambiguous or (j is not None and j in ambiguous)))
                done.add(i)
                if j is not None:
                    done.add(j)
            for i in ambiguous - done:
                events.append(CrossingEvent(times[k], i + 1, i + 1, 0.0, True))
            for i in range(count):
                if overlap[i, new_assign[i]] < threshold:
                    events.append(CrossingEvent(times[k], i + 1, i + 1, float("nan"), True))
            assign = new_assign
            # keep state signs aligned with the previous sample
            nxt = spec.states[assign]
            signs = np.sign(np.sum(nxt * current, axis=1))
            signs[signs == 0] = 1.0
            current = nxt * signs[:, None]
        energies[k] = spec.energies[assign]
        ranks[k] = assign
        if k in snap_idx:
            snapshots[snap_idx[k]] = (times[k], current.copy())
    return EigenTrajectorySet(times, energies, ranks, events, snapshots, sorted_e)
