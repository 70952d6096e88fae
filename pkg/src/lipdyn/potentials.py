"""Potential curves, Gaussian pulse envelopes and the coupled 3x3 potential matrix.

Channel order is (X, A, Pi). With the rotating wave approximation the dressed
potential matrix is

    [ U_X(R)       Omega_1(t)         0                          ]
    [ Omega_1(t)   U_A(R) + D1        Omega_2(t)                 ]
    [ 0            Omega_2(t)         U_Pi(R) + D1 + D2          ]

in atomic units (hbar = 1), with Omega_i(t) = Omega_i exp(-((t - t_i)/T_i)^2).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

CHANNELS = ("X", "A", "Pi")


class DomainError(ValueError):
    """Evaluation outside the range where a curve is defined."""


@dataclass(frozen=True)
class Morse:
    """V(R) = V0 + De (1 - exp(-a (R - Re)))^2."""

    De: float
    a: float
    Re: float
    V0: float = 0.0

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return self.V0 + self.De * (1.0 - np.exp(-self.a * (r - self.Re))) ** 2

    def harmonic_frequency(self, mass: float) -> float:
        return self.a * np.sqrt(2.0 * self.De / mass)

    def levels(self, mass: float, count: int) -> np.ndarray:
        """Closed-form Morse vibrational energies (relative to the minimum, plus V0)."""
        w = self.harmonic_frequency(mass)
        x = w * (np.arange(count) + 0.5)
        return self.V0 + x - x**2 / (4.0 * self.De)


@dataclass(frozen=True)
class Harmonic:
    """V(R) = V0 + k (R - Re)^2 / 2."""

    k: float
    Re: float
    V0: float = 0.0

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return self.V0 + 0.5 * self.k * (r - self.Re) ** 2


@dataclass(frozen=True)
class Tabulated:
    """Cubic-spline interpolation of (R, V) nodes; defined only inside the node range."""

    r_nodes: tuple
    v_nodes: tuple
    _spline: CubicSpline = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        r = np.asarray(self.r_nodes, dtype=float)
        v = np.asarray(self.v_nodes, dtype=float)
        if r.ndim != 1 or r.shape != v.shape or r.size < 4:
            raise ValueError("tabulated curve needs matching 1D node arrays with at least 4 points")
        if np.any(np.diff(r) <= 0):
            raise ValueError("tabulated R nodes must be strictly ascending")
        object.__setattr__(self, "r_nodes", tuple(r))
        object.__setattr__(self, "v_nodes", tuple(v))
        object.__setattr__(self, "_spline", CubicSpline(r, v))

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        lo, hi = self.r_nodes[0], self.r_nodes[-1]
        if np.any((r < lo) | (r > hi)):
            raise DomainError(f"R outside tabulated range [{lo}, {hi}] bohr")
        return self._spline(r)


PotentialCurve = Morse | Harmonic | Tabulated


def evaluate_curve(curve: PotentialCurve, r):
    return curve(r)


# below this the envelope is treated as exactly zero
_ENVELOPE_FLOOR = 1e-300


@dataclass(frozen=True)
class PulseEnvelope:
    """Gaussian Rabi-frequency envelope, omega0 * exp(-((t - t_center) / width)^2)."""

    omega0: float
    t_center: float
    width: float

    def __post_init__(self):
        if not self.width > 0:
            raise ValueError("pulse width must be positive")

    def __call__(self, t: float) -> float:
        value = self.omega0 * np.exp(-(((t - self.t_center) / self.width) ** 2))
        return 0.0 if abs(value) < _ENVELOPE_FLOOR else float(value)


def envelope(pulse: PulseEnvelope, t: float) -> float:
    return pulse(t)


@dataclass(frozen=True)
class CoupledPotential:
    """Three diabatic curves, two detunings and two pulses, all in atomic units."""

    x: PotentialCurve
    a: PotentialCurve
    pi: PotentialCurve
    delta1: float
    delta2: float
    pulse1: PulseEnvelope
    pulse2: PulseEnvelope

    def diagonals(self, r) -> np.ndarray:
        """Dressed diagonal entries, shape ``r.shape + (3,)``; independent of time."""
        r = np.asarray(r, dtype=float)
        return np.stack(
            [self.x(r), self.a(r) + self.delta1, self.pi(r) + (self.delta1 + self.delta2)],
            axis=-1,
        )

    def couplings(self, t: float) -> tuple[float, float]:
        return self.pulse1(t), self.pulse2(t)

    def coupling_matrix(self, r: float, t: float) -> np.ndarray:
        return self.matrix_field(np.array([r], dtype=float), t)[0]

    def matrix_field(self, r, t: float) -> np.ndarray:
        """Potential matrices at every point of ``r`` (array or SpatialGrid), shape (n, 3, 3)."""
        r = getattr(r, "r", r)
        return assemble(self.diagonals(np.atleast_1d(r)), *self.couplings(t))

    def with_pulses_off(self) -> "CoupledPotential":
        off = PulseEnvelope(0.0, 0.0, 1.0)
        return CoupledPotential(self.x, self.a, self.pi, self.delta1, self.delta2, off, off)


def assemble(diag: np.ndarray, omega1: float, omega2: float) -> np.ndarray:
    """Tridiagonal potential matrices from (n, 3) diagonals and the two couplings."""
    n = diag.shape[0]
    m = np.zeros((n, 3, 3))
    m[:, 0, 0] = diag[:, 0]
    m[:, 1, 1] = diag[:, 1]
    m[:, 2, 2] = diag[:, 2]
    m[:, 0, 1] = m[:, 1, 0] = omega1
    m[:, 1, 2] = m[:, 2, 1] = omega2
    return m


def coupling_matrix(cp: CoupledPotential, r: float, t: float) -> np.ndarray:
    return cp.coupling_matrix(r, t)


def matrix_field(cp: CoupledPotential, grid, t: float) -> np.ndarray:
    return cp.matrix_field(grid, t)


WELLS = {"left": 0, "right": 2}


def well_potential(cp: CoupledPotential, r, well: str) -> np.ndarray:
    """Field-free single-channel potential of a well: X for 'left', dressed Pi for 'right'."""
    if well not in WELLS:
        raise ValueError(f"well must be 'left' or 'right', got {well!r}")
    return cp.diagonals(r)[..., WELLS[well]]
