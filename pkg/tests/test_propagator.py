import numpy as np
import pytest

from lipdyn.analysis import channel_populations, well_basis
from lipdyn.grid import make_grid
from lipdyn.potentials import Harmonic
from lipdyn.propagator import (ChannelWavefunction, PropagationError, PropagationSettings, SplitOperator,
                               brute_force_step, edge_density, initial_state, potential_exponential, propagate,
                               step)
from lipdyn.units import to_internal

from conftest import MASS, na2_like
from oracles import brute_force_difference, landau_zener, rabi, toy_system


def test_potential_exponential_matches_expm():
    import scipy.linalg

    rng = np.random.default_rng(0)
    b = rng.normal(size=(20, 3, 3))
    a = b + np.swapaxes(b, 1, 2)
    u = potential_exponential(a, 0.7)
    for m, um in zip(a, u):
        np.testing.assert_allclose(um, scipy.linalg.expm(-0.7j * m), atol=1e-13)


def test_settings_steps():
    s = PropagationSettings(0.3, 0.0, 1.0)
    assert s.n_steps == 4
    assert s.step_times()[-1] == 1.0
    assert PropagationSettings(0.25, 0.0, 1.0).n_steps == 4
    with pytest.raises(ValueError):
        PropagationSettings(0.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        PropagationSettings(0.1, 1.0, 0.0)


def test_initial_state_is_normalized_well_state(grid256):
    cp = na2_like()
    psi = initial_state(cp, grid256, MASS, "right", 1)
    assert psi.norm() == pytest.approx(1.0, abs=1e-12)
    assert channel_populations(psi, grid256) == pytest.approx((0.0, 0.0, 1.0), abs=1e-12)


def test_stationary_state(grid256):
    cp = na2_like().with_pulses_off()
    psi0 = initial_state(cp, grid256, MASS, "left", 0)
    energy = well_basis(cp, grid256, MASS, "left", 1).energies[0]
    dt = to_internal(1.0, "fs")
    res = propagate(psi0, cp, grid256, MASS, PropagationSettings(dt, 0.0, 2000 * dt, record_stride=100))
    overlap = np.sum(psi0.psi[0].conj() * res.final.psi[0]) * grid256.dr
    assert abs(overlap) == pytest.approx(1.0, abs=1e-8)
    # splitting shifts the quasi-energy at O(dt^2)
    phase_error = np.angle(overlap * np.exp(1j * energy * res.final.t))
    assert abs(phase_error) / (energy * res.final.t) < 1e-4


def test_rabi_oscillation():
    t, numeric, exact = rabi()
    assert np.max(np.abs(numeric - exact)) <= 1e-6


@pytest.mark.parametrize("p", [0.1, 0.5, 0.9])
def test_landau_zener(p):
    numeric, exact = landau_zener(p)
    assert abs(numeric / exact - 1) <= 0.02


def test_brute_force_single_steps():
    grid, cp, mass, psi = toy_system()
    a = brute_force_step(psi, cp, grid, mass, 0.01)
    b = step(psi, cp, grid, mass, 0.01)
    assert np.sqrt(np.sum(np.abs(a.psi - b.psi) ** 2) * grid.dr) < 1e-10
    with pytest.raises(ValueError):
        brute_force_step(ChannelWavefunction(np.zeros((3, 256), complex), make_grid(0, 1, 256)), cp,
                         make_grid(0, 1, 256), mass, 0.01)


@pytest.mark.slow
def test_brute_force_thousand_steps():
    worst, transferred = brute_force_difference()
    assert worst <= 1e-8
    assert transferred > 0.5


def test_second_order_convergence():
    grid, cp, mass, psi0 = toy_system()
    t_end = 8.0

    def run(dt):
        res = propagate(psi0, cp, grid, mass, PropagationSettings(dt, 0.0, t_end, record_stride=10**9))
        return res.final.psi

    ref = run(0.0125)
    errs = [np.sqrt(np.sum(np.abs(run(dt) - ref) ** 2) * grid.dr) for dt in (0.4, 0.2, 0.1)]
    for coarse, fine in zip(errs, errs[1:]):
        assert 3.0 < coarse / fine < 5.0


def test_norm_and_time_reversal():
    grid, cp, mass, psi0 = toy_system()
    psi = psi0.psi.copy()
    stepper = SplitOperator(cp, grid, mass)
    t = 0.0
    for _ in range(200):
        stepper.step(psi, t, 0.05)
        t += 0.05
    assert np.sum(np.abs(psi) ** 2) * grid.dr == pytest.approx(1.0, abs=1e-12)
    for _ in range(200):
        stepper.step(psi, t, -0.05)
        t -= 0.05
    np.testing.assert_allclose(psi, psi0.psi, atol=1e-11)


def test_recording_and_snapshots(grid256):
    cp = na2_like(t1=0.2, t2=0.1, width=0.1)
    psi0 = initial_state(cp, grid256, MASS, "left", 0)
    dt = to_internal(2.0, "fs")
    seen = []
    settings = PropagationSettings(dt, 0.0, 25.5 * dt, record_stride=10, snapshot_times=(0.0, 10 * dt))
    res = propagate(psi0, cp, grid256, MASS, settings, observers=[lambda t, p: seen.append(t)])
    assert len(res.times) == 4  # start, 10, 20, final partial step
    assert res.times[-1] == pytest.approx(25.5 * dt)
    assert seen == res.times
    assert [t for t, _ in res.snapshots] == pytest.approx([0.0, 10 * dt])
    np.testing.assert_allclose(res.norm, 1.0, atol=1e-12)
    assert not res.boundary_contaminated


def test_boundary_watchdog():
    grid = make_grid(-3.0, 3.0, 64)
    cp = na2_like().with_pulses_off()
    psi = np.zeros((3, 64), complex)
    psi[0] = np.exp(-grid.r**2 / 2)
    psi /= np.sqrt(np.sum(np.abs(psi) ** 2) * grid.dr)
    assert edge_density(psi, grid) > 1e-6
    flat = type(cp)(Harmonic(0.0, 0.0), Harmonic(0.0, 0.0), Harmonic(0.0, 0.0), 0.0, 0.0, cp.pulse1, cp.pulse2)
    res = propagate(ChannelWavefunction(psi, grid), flat, grid, 1.0, PropagationSettings(0.1, 0.0, 1.0))
    assert res.boundary_contaminated


def test_nonfinite_state_raises():
    grid, cp, mass, psi0 = toy_system()
    psi = psi0.psi.copy()
    psi[0, 3] = np.nan
    with pytest.raises(PropagationError):
        SplitOperator(cp, grid, mass).step(psi, 0.0, 0.01)
