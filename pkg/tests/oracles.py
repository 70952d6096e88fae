"""Analytic test systems shared by the unit and acceptance tests."""

import numpy as np

from lipdyn.grid import make_grid
from lipdyn.potentials import CoupledPotential, Harmonic, PulseEnvelope
from lipdyn.propagator import ChannelWavefunction, PropagationSettings, SplitOperator, brute_force_step, propagate


class LinearCrossing:
    """Spatially flat two-level crossing X: +alpha t / 2, A: -alpha t / 2, coupled by omega; Pi is far away."""

    def __init__(self, alpha: float, omega: float):
        self.alpha, self.omega = alpha, omega

    def matrix_field(self, r, t):
        m = np.zeros((len(r), 3, 3))
        m[:, 0, 0] = 0.5 * self.alpha * t
        m[:, 1, 1] = -0.5 * self.alpha * t
        m[:, 2, 2] = 1.0
        m[:, 0, 1] = m[:, 1, 0] = self.omega
        return m


def landau_zener(p_target: float, omega: float = 1e-2, span: float = 400.0, dt: float = 0.1):
    """Diabatic survival after a sweep through the crossing, and the LZ prediction."""
    alpha = 2 * np.pi * omega**2 / -np.log(p_target)
    t_half = span * omega / alpha
    grid = make_grid(0.0, 1.0, 4)
    psi = np.zeros((3, 4), complex)
    psi[0] = 1.0
    res = propagate(ChannelWavefunction(psi, grid, -t_half), LinearCrossing(alpha, omega), grid, 1.0,
                    PropagationSettings(dt, -t_half, t_half, record_stride=10**9))
    return res.populations[-1][0], np.exp(-2 * np.pi * omega**2 / alpha)


def rabi(omega: float = 0.01, periods: float = 2.0, dt: float = 0.5):
    """Resonant flat X-A system under a constant coupling; returns (t, P_A numeric, P_A exact)."""
    grid = make_grid(0.0, 1.0, 4)
    flat = Harmonic(0.0, 0.0)
    cp = CoupledPotential(flat, flat, flat, 0.0, 0.3, PulseEnvelope(omega, 0.0, 1e30), PulseEnvelope(0.0, 0.0, 1.0))
    psi = np.zeros((3, 4), complex)
    psi[0] = 1.0
    t_end = periods * np.pi / omega
    res = propagate(ChannelWavefunction(psi, grid), cp, grid, 1.0, PropagationSettings(dt, 0.0, t_end))
    t = np.asarray(res.times)
    return t, res.population_array[:, 1], np.sin(omega * t) ** 2


def toy_system():
    """64-point, three-channel toy with strong smooth pulses."""
    grid = make_grid(-8.0, 8.0, 64)
    cp = CoupledPotential(Harmonic(0.01, -1.0), Harmonic(0.01, 0.0, 0.02), Harmonic(0.01, 1.0, -0.01), 0.0, 0.0,
                          PulseEnvelope(0.3, 6.0, 4.0), PulseEnvelope(0.25, 4.0, 4.0))
    mass = 10.0
    psi = np.zeros((3, 64), complex)
    psi[0] = np.exp(-((grid.r + 1) ** 2) / 2 * np.sqrt(0.01 * mass))
    psi /= np.sqrt(np.sum(np.abs(psi) ** 2) * grid.dr)
    return grid, cp, mass, ChannelWavefunction(psi, grid, 0.0)


def brute_force_difference(steps: int = 1000, dt: float = 0.01):
    """Max state-norm distance between split-operator and dense-exponential propagation."""
    grid, cp, mass, psi0 = toy_system()
    exact = psi0.copy()
    split = psi0.psi.copy()
    stepper = SplitOperator(cp, grid, mass)
    worst, t = 0.0, 0.0
    for _ in range(steps):
        exact = brute_force_step(exact, cp, grid, mass, dt)
        stepper.step(split, t, dt)
        t += dt
        worst = max(worst, float(np.sqrt(np.sum(np.abs(exact.psi - split) ** 2) * grid.dr)))
    transferred = float(np.sum(np.abs(split[1:]) ** 2) * grid.dr)
    return worst, transferred
