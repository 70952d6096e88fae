"""Scenario orchestration: single runs, parameter scans, eigen and LIP queries."""

from __future__ import annotations

import itertools
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import ScenarioResult, TransferReport, transfer_report
from .config import ScanSpec, ScenarioConfig, dump_config, parse_config, set_path
from .eigensolve import bound_states
from .io import (OutputError, write_csv, write_densities, write_events, write_lip_energies,
                 write_populations, write_projections, write_transfer_report)
from .lip import active_spectrum, lip_at, track_trajectories
from .propagator import PropagationError, initial_state, propagate
from .units import AU_TIME_IN_PS, BOHR_IN_ANGSTROM, from_internal, to_internal

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4
EXIT_BOUNDARY = 5


@dataclass
class ScenarioRun:
    config: ScenarioConfig
    result: ScenarioResult
    report: TransferReport
    trajectories: object = None
    exit_code: int = EXIT_OK


def simulate(config: ScenarioConfig, threads: int = 1, progress=None) -> ScenarioRun:
    """Propagate a scenario and build its transfer report (no file output)."""
    cp, grid, mass = config.potential, config.grid, config.mass
    psi0 = initial_state(cp, grid, mass, *config.initial)
    settings = config.propagation
    result = propagate(psi0, cp, grid, mass, settings, workers=threads, progress=progress)
    result.metadata = {"name": config.name, "version": __version__}
    report = transfer_report(result, cp, grid, mass, config.initial, max_nu=config.analysis.projection_count)
    code = EXIT_BOUNDARY if result.boundary_contaminated else EXIT_OK
    return ScenarioRun(config, result, report, exit_code=code)


def lip_times(config: ScenarioConfig) -> np.ndarray:
    p = config.propagation
    step = config.analysis.lip_sample
    n = int(np.floor((p.t_end - p.t_start) / step + 1e-9))
    return p.t_start + step * np.arange(n + 1)


def track(config: ScenarioConfig, threads: int = 1, times=None):
    times = lip_times(config) if times is None else times
    return track_trajectories(config.potential, config.grid, config.mass, times, config.analysis.lip_count,
                              snapshot_times=config.analysis.lip_snapshot_times, workers=threads)


def _metadata(config: ScenarioConfig, extra: dict | None = None) -> dict:
    g = config.grid
    meta = {
        "name": config.name,
        "version": __version__,
        "grid": {"r_min_bohr": g.r_min, "r_max_bohr": g.r_max, "n": g.n, "dr_bohr": g.dr},
        "mass_me": config.mass,
    }
    meta.update(extra or {})
    return meta


def write_run(run: ScenarioRun, out_dir: Path) -> list[Path]:
    config = run.config
    out_dir.mkdir(parents=True, exist_ok=True)
    files = set(config.outputs.files)
    written = []
    if "populations" in files:
        written.append(write_populations(out_dir / "populations.csv", run.result))
    if "densities" in files:
        written.append(write_densities(out_dir / "densities.bin", config.grid, run.result.snapshots))
    if "transfer_report" in files:
        written.append(write_transfer_report(out_dir / "transfer_report.csv", run.report,
                                             run.result.boundary_contaminated))
        written.append(write_projections(out_dir / "final_projections.csv", run.report.weights))
    if run.trajectories is not None:
        written.append(write_lip_energies(out_dir / "lip_energies.csv", run.trajectories))
        written.append(write_events(out_dir / "events.csv", run.trajectories))
    try:
        (out_dir / "config_echo.toml").write_text(dump_config(config))
        meta = _metadata(config, {"boundary_contaminated": run.result.boundary_contaminated,
                                  "exit_code": run.exit_code})
        (out_dir / "metadata.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise OutputError(out_dir, exc) from exc
    return written


def run_scenario(config: ScenarioConfig, out_dir: str | Path | None = None, threads: int = 1,
                 progress=None) -> ScenarioRun:
    """Run a scenario and write its output files.

    The returned run's ``exit_code`` is 0, or 5 if the boundary watchdog
    fired. Numerical failures raise :class:`PropagationError`; write
    failures raise :class:`OutputError`.
    """
    out = Path(out_dir if out_dir is not None else config.outputs.directory)
    run = simulate(config, threads=threads, progress=progress)
    if "lip_energies" in config.outputs.files:
        run.trajectories = track(config, threads)
    write_run(run, out)
    return run


def _scan_cell(args):
    raw, base_dir, objective, target = args
    try:
        config = parse_config_from_raw(raw, base_dir)
        run = simulate(config)
        rep = run.report
        if objective == "final_pi_population":
            value = rep.final_populations[2]
        elif objective == "final_target_weight":
            value = rep.weights.get(target, 0.0)
        else:
            value = rep.final_weight
        return {"objective": value, "final_well": rep.final[0], "final_nu": rep.final[1],
                "dominant_weight": rep.final_weight, "P": rep.final_populations, "error": ""}
    except Exception as exc:  # per-cell failures are recorded, not fatal
        return {"objective": float("nan"), "final_well": "", "final_nu": -1, "dominant_weight": float("nan"),
                "P": (float("nan"),) * 3, "error": f"{type(exc).__name__}: {exc}".replace(",", ";")}


def parse_config_from_raw(raw: dict, base_dir=".") -> ScenarioConfig:
    import tomli_w

    return parse_config(tomli_w.dumps(raw), base_dir)


class ScanTooLarge(ValueError):
    pass


def run_scan(scan: ScanSpec, out_path: str | Path | None = None, threads: int = 1) -> list[dict]:
    """Evaluate every point of the scan grid; rows come back in axis-lexicographic order."""
    sizes = [len(v) for _, v in scan.axes]
    total = int(np.prod(sizes))
    if total > scan.job_cap:
        raise ScanTooLarge(f"scan has {total} cells, above job_cap {scan.job_cap}")
    combos = list(itertools.product(*[v for _, v in scan.axes]))
    jobs = []
    for combo in combos:
        raw = scan.base.raw
        for (path, _), value in zip(scan.axes, combo):
            raw = set_path(raw, path, value)
        jobs.append((raw, ".", scan.objective, scan.target))
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as ex:
            outcomes = list(ex.map(_scan_cell, jobs))
    else:
        outcomes = [_scan_cell(j) for j in jobs]
    rows = []
    for combo, res in zip(combos, outcomes):
        row = {path: value for (path, _), value in zip(scan.axes, combo)}
        row.update(res)
        rows.append(row)
    if out_path is not None:
        header = [p for p, _ in scan.axes] + ["objective", "final_well", "final_nu", "dominant_weight",
                                              "P_X", "P_A", "P_Pi", "error"]
        write_csv(out_path, header, (
            [str(r[p]) for p, _ in scan.axes]
            + [r["objective"], r["final_well"], int(r["final_nu"]), r["dominant_weight"], *r["P"], r["error"]]
            for r in rows))
    return rows


SURFACES = ("X", "A", "Pi", "active")


def eigen_command(config: ScenarioConfig, surface: str, count: int, t: float = 0.0,
                  out_dir: str | Path | None = None, states: bool = False):
    """Bound states of one dressed diabatic curve or of the active LIP at time ``t`` (a.u.)."""
    cp, grid, mass = config.potential, config.grid, config.mass
    if surface == "active":
        basis = active_spectrum(cp, grid, mass, t, count)
    elif surface in ("X", "A", "Pi"):
        col = {"X": 0, "A": 1, "Pi": 2}[surface]
        basis = bound_states(cp.diagonals(grid.r)[:, col], grid, mass, count, label=surface)
    else:
        raise ValueError(f"surface must be one of {SURFACES}")
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_csv(out / f"eigen_{surface}.csv", ["index", "E_cm1"],
                  ([i, e] for i, e in enumerate(from_internal(basis.energies, "cm-1"))))
        if states:
            header = ["R_angstrom"] + [f"phi{i}_per_sqrt_bohr" for i in range(len(basis))]
            write_csv(out / f"eigen_{surface}_states.csv", header,
                      ([r * BOHR_IN_ANGSTROM, *col] for r, col in zip(grid.r, basis.states.T)))
    return basis


def lip_command(config: ScenarioConfig, times_ps, out_dir: str | Path, threads: int = 1, track_states: bool = True):
    """Write LIP surfaces at the requested times and, optionally, tracked trajectories."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cp, grid = config.potential, config.grid
    rows = []
    for tp in times_ps:
        s = lip_at(cp, grid, to_internal(tp, "ps"))
        vals = from_internal(s.values, "cm-1")
        act = from_internal(s.active, "cm-1")
        rows.extend([tp, r * BOHR_IN_ANGSTROM, *v, a] for r, v, a in zip(grid.r, vals, act))
    write_csv(out / "lip_surfaces.csv", ["t_ps", "R_angstrom", "V1_cm1", "V2_cm1", "V3_cm1", "active_cm1"], rows)
    traj = None
    if track_states:
        traj = track(config, threads)
        write_lip_energies(out / "lip_energies.csv", traj)
        write_events(out / "events.csv", traj)
    return traj
