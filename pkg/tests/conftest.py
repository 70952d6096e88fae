import sys
import numpy as np
import pytest

from lipdyn.config import parse_config
from lipdyn.grid import make_grid
from lipdyn.potentials import CoupledPotential, Morse, PulseEnvelope
from lipdyn.units import NA2_REDUCED_MASS_AMU, to_internal

MASS = to_internal(NA2_REDUCED_MASS_AMU, "amu")

SMALL_CONFIG = """
name = "small"
mass = "11.49488464 amu"

[grid]
r_min = 2.0
r_max = 10.0
n = 128

[curves.X]
type = "morse"
De = "8726.3742 cm-1"
a = "0.703304 1/angstrom"
Re = "3.0789 angstrom"

[curves.A]
type = "morse"
De = "9622.9630 cm-1"
a = "0.493802 1/angstrom"
Re = "3.6384 angstrom"

[curves.Pi]
type = "morse"
De = "2795.9694 cm-1"
a = "0.814955 1/angstrom"
Re = "3.6662 angstrom"

[drive]
delta1 = "2010 cm-1"
delta2 = "-2010 cm-1"
omega = "733 cm-1"
t1 = "1.0 ps"
t2 = "0.8 ps"
width = "0.3 ps"

[initial]
well = "left"
nu = 0

[propagation]
dt = "2 fs"
t_start = "0 ps"
t_end = "0.4 ps"
record_stride = 10
snapshot_times = ["0 ps", "0.2 ps"]

[outputs]
directory = "small_out"

[analysis]
projection_count = 6
lip_count = 3
lip_sample = "0.1 ps"
"""


def na2_like(d1=2010.0, d2=-2010.0, omega=733.0, t1=25.5, t2=20.5, width=5.5) -> CoupledPotential:
    def morse(de, a, re):
        return Morse(to_internal(de, "cm-1"), to_internal(a, "1/angstrom"), to_internal(re, "angstrom"))

    return CoupledPotential(
        morse(8726.3742, 0.703304, 3.0789), morse(9622.9630, 0.493802, 3.6384), morse(2795.9694, 0.814955, 3.6662),
        to_internal(d1, "cm-1"), to_internal(d2, "cm-1"),
        PulseEnvelope(to_internal(omega, "cm-1"), to_internal(t1, "ps"), to_internal(width, "ps")),
        PulseEnvelope(to_internal(omega, "cm-1"), to_internal(t2, "ps"), to_internal(width, "ps")),
    )


@pytest.fixture
def small_config_text():
    return SMALL_CONFIG


@pytest.fixture
def small_config():
    return parse_config(SMALL_CONFIG)


@pytest.fixture
def grid256():
    return make_grid(2.0, 10.0, 256, "angstrom")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
