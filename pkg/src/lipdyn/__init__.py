"""Three-channel wave-packet dynamics in light-induced potentials of diatomic molecules."""

__version__ = "0.1.0"

from .analysis import (ScenarioResult, TransferReport, channel_populations, count_peaks, density_snapshot,
                       lip_following, transfer_report, vibrational_projection, well_basis)
from .config import load_config, load_scenario, parse_config
from .eigensolve import BoundStateSet, bound_states, eig3_symmetric, eigenfield
from .grid import SpatialGrid, kinetic_phase, make_grid
from .lip import active_spectrum, lip_at, track_trajectories
from .potentials import CoupledPotential, Harmonic, Morse, PulseEnvelope, Tabulated
from .propagator import (ChannelWavefunction, PropagationSettings, brute_force_step, initial_state, propagate,
                         step)
from .units import from_internal, to_internal
