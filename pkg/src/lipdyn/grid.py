"""Uniform periodic spatial grid and kinetic propagation factors."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .units import to_internal


@dataclass(frozen=True)
class SpatialGrid:
    """Uniform grid on [r_min, r_max) in bohr with ``n`` points (power of two).

    The right end point is excluded so that the grid is periodic with period
    ``r_max - r_min``, which is the convention of the FFT.
    """

    r_min: float
    r_max: float
    n: int
    r: np.ndarray = field(init=False, repr=False, compare=False)
    k: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.r_max > self.r_min:
            raise ValueError(f"r_max ({self.r_max}) must exceed r_min ({self.r_min})")
        n = int(self.n)
        if n < 2 or n & (n - 1):
            raise ValueError(f"grid size must be a power of two >= 2, got {self.n}")
        dr = self.dr
        r = self.r_min + dr * np.arange(n)
        k = 2.0 * np.pi * np.fft.fftfreq(n, d=dr)
        r.flags.writeable = False
        k.flags.writeable = False
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "k", k)

    @property
    def dr(self) -> float:
        return (self.r_max - self.r_min) / self.n

    @property
    def length(self) -> float:
        return self.r_max - self.r_min


def make_grid(r_min: float, r_max: float, n: int, unit: str = "bohr") -> SpatialGrid:
    """Build a :class:`SpatialGrid`, converting the bounds from ``unit`` to bohr."""
    return SpatialGrid(float(to_internal(r_min, unit)), float(to_internal(r_max, unit)), n)


def kinetic_phase(grid: SpatialGrid, mass: float, dt: float) -> np.ndarray:
    """Factors exp(-i k^2 dt / 2m) in FFT ordering (atomic units).

    ``dt`` may be negative for backward propagation.
    """
    if mass <= 0:
        raise ValueError("mass must be positive")
    return np.exp(-0.5j * dt / mass * grid.k**2)
