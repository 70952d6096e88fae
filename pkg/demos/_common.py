"""Shared helpers for the demo scripts: coarse copies of shipped scenarios and figure output."""

from dataclasses import replace
from pathlib import Path

from lipdyn.config import load_scenario
from lipdyn.grid import make_grid
from lipdyn.units import to_internal

OUT = Path(__file__).parent / "output"


def coarse(name: str, n: int = 256, dt_fs: float = 2.0):
    """A shipped scenario on a coarser grid and time step (seconds instead of minutes)."""
    c = load_scenario(name)
    grid = make_grid(c.grid.r_min, c.grid.r_max, n)
    return replace(c, grid=grid, propagation=replace(c.propagation, dt=to_internal(dt_fs, "fs"), record_stride=10))


def figure():
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        return None
    OUT.mkdir(exist_ok=True)
    return plt
