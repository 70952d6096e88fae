"""Output file formats.

CSV files have a header naming units, LF line endings, and floats with 17
significant digits. Density snapshots go to a little-endian binary file:

    b"LIPS", u32 version (=1), u64 n, f64 r_min [bohr], f64 dr [bohr],
    then per snapshot: f64 t [ps], 3*n f64 channel densities (X, A, Pi), n f64 total
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .units import AU_TIME_IN_PS, from_internal

MAGIC = b"LIPS"
VERSION = 1
_HEADER = struct.Struct("<4sIQdd")


class OutputError(OSError):
    """Writing an output file failed; carries the path."""

    def __init__(self, path, exc):
        self.path = Path(path)
        super().__init__(f"cannot write {path}: {exc}")


def fmt(x) -> str:
    return format(float(x), ".16e")


def write_csv(path, header: list[str], rows) -> Path:
    path = Path(path)
    try:
        with open(path, "w", newline="\n") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(v if isinstance(v, str) else (str(v) if isinstance(v, (int, np.integer)) else fmt(v))
                                  for v in row) + "\n")
    except OSError as exc:
        raise OutputError(path, exc) from exc
    return path


def write_populations(path, result) -> Path:
    rows = ((t, *p, n) for t, p, n in zip(result.times_ps, result.populations, result.norm))
    return write_csv(path, ["t_ps", "P_X", "P_A", "P_Pi", "norm"], rows)


def write_lip_energies(path, traj) -> Path:
    k = traj.energies.shape[1]
    header = ["t_ps"] + [f"E{i + 1}_cm1" for i in range(k)]
    rows = ((t * AU_TIME_IN_PS, *from_internal(e, "cm-1")) for t, e in zip(traj.times, traj.energies))
    return write_csv(path, header, rows)


def write_events(path, traj) -> Path:
    rows = ((e.t * AU_TIME_IN_PS, e.state_a, e.state_b, from_internal(e.min_gap, "cm-1")) for e in traj.events)
    return write_csv(path, ["t_ps", "state_a", "state_b", "min_gap_cm1"], rows)


def write_densities(path, grid, snapshots) -> Path:
    """``snapshots`` is an iterable of (t [a.u.], psi (3, n))."""
    path = Path(path)
    try:
        with open(path, "wb") as fh:
            fh.write(_HEADER.pack(MAGIC, VERSION, grid.n, grid.r_min, grid.dr))
            for t, psi in snapshots:
                dens = (psi.real**2 + psi.imag**2).astype("<f8")
                fh.write(struct.pack("<d", t * AU_TIME_IN_PS))
                fh.write(dens.tobytes())
                fh.write(dens.sum(axis=0).astype("<f8").tobytes())
    except OSError as exc:
        raise OutputError(path, exc) from exc
    return path


def read_densities(path):
    """Read a density file; returns (r_min, dr, times_ps, channel (m, 3, n), total (m, n))."""
    data = Path(path).read_bytes()
    magic, version, n, r_min, dr = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise ValueError(f"{path}: not a density snapshot file")
    if version != VERSION:
        raise ValueError(f"{path}: unsupported version {version}")
    record = 8 * (1 + 4 * n)
    body = data[_HEADER.size:]
    if len(body) % record:
        raise ValueError(f"{path}: truncated snapshot record")
    m = len(body) // record
    arr = np.frombuffer(body, dtype="<f8").reshape(m, 1 + 4 * n)
    times = arr[:, 0].copy()
    channels = arr[:, 1:1 + 3 * n].reshape(m, 3, n).copy()
    total = arr[:, 1 + 3 * n:].copy()
    return r_min, dr, times, channels, total


def write_transfer_report(path, report, contaminated: bool = False) -> Path:
    header = ["initial_well", "initial_nu", "final_well", "final_nu", "final_weight",
              "P_X", "P_A", "P_Pi", "residual_oscillation", "boundary_contaminated"]
    row = [report.initial[0], int(report.initial[1]), report.final[0], int(report.final[1]), report.final_weight,
           *report.final_populations, report.residual_oscillation, str(int(contaminated))]
    return write_csv(path, header, [row])


def write_projections(path, weights: dict) -> Path:
    rows = ([well, int(nu), w] for (well, nu), w in sorted(weights.items()))
    return write_csv(path, ["well", "nu", "weight"], rows)
