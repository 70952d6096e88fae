"""Scenario and scan configuration files (TOML).

Physical quantities are written as strings with a unit, e.g. ``"2010 cm-1"``
or ``"25.5 ps"``; the grid block instead takes plain numbers plus a
``units`` key. Parsing is strict: unknown keys are rejected. See
``lipdyn/data/*.toml`` for the shipped scenarios.
"""

from __future__ import annotations

import copy
import csv
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib
import tomli_w

from .grid import SpatialGrid, make_grid
from .potentials import CoupledPotential, Harmonic, Morse, PulseEnvelope, Tabulated
from .propagator import PropagationSettings
from .units import UnitError, parse_quantity, to_internal

DATA_DIR = Path(__file__).parent / "data"
SCENARIOS = ("fig2_aplip", "fig3_tailoring", "fig5a", "fig5b")
OUTPUT_FILES = ("populations", "lip_energies", "densities", "transfer_report")
OBJECTIVES = ("final_pi_population", "final_target_weight", "dominant_weight")


class ConfigError(ValueError):
    """Base class for configuration problems (exit code 2)."""


class ConfigSyntaxError(ConfigError):
    pass


class UnknownKeyError(ConfigError):
    pass


class MissingKeyError(ConfigError):
    pass


class UnitViolation(ConfigError):
    pass


class NonPhysicalValue(ConfigError):
    pass


# block -> (required keys, optional keys)
_SCHEMA: dict[str, tuple[set, set]] = {
    "grid": ({"r_min", "r_max", "n"}, {"units"}),
    "curves": (set(), {"file", "X", "A", "Pi"}),
    "drive": ({"delta1", "delta2", "t1", "t2"}, {"omega", "omega1", "omega2", "width", "width1", "width2"}),
    "initial": ({"well", "nu"}, set()),
    "propagation": ({"dt", "t_start", "t_end"}, {"record_stride", "snapshot_times"}),
    "outputs": ({"directory"}, {"files"}),
    "analysis": (set(), {"projection_count", "lip_count", "lip_sample", "lip_snapshot_times"}),
}
_TOP_REQUIRED = ("mass", "grid", "curves", "drive", "initial", "propagation")
_TOP_OPTIONAL = ("name", "outputs", "analysis")

_CURVE_KEYS = {
    "morse": ({"type", "De", "a", "Re"}, {"V0", "source"}),
    "harmonic": ({"type", "k", "Re"}, {"V0", "source"}),
    "tabulated": ({"type"}, {"r", "v", "file", "r_unit", "v_unit", "source"}),
}


@dataclass(frozen=True)
class OutputSpec:
    directory: str
    files: tuple = OUTPUT_FILES


@dataclass(frozen=True)
class AnalysisSpec:
    projection_count: int = 8
    lip_count: int = 5
    lip_sample: float = to_internal(0.05, "ps")
    lip_snapshot_times: tuple = ()


@dataclass(frozen=True)
class ScenarioConfig:
    """A validated scenario; every quantity in atomic units."""

    name: str
    grid: SpatialGrid
    mass: float
    potential: CoupledPotential
    initial: tuple
    propagation: PropagationSettings
    outputs: OutputSpec
    analysis: AnalysisSpec
    raw: dict = field(compare=False, repr=False, default_factory=dict)


def _check_keys(table: dict, required: set, optional: set, where: str):
    if not isinstance(table, dict):
        raise ConfigError(f"[{where}] must be a table")
    unknown = set(table) - required - optional
    if unknown:
        raise UnknownKeyError(f"unknown key(s) in [{where}]: {', '.join(sorted(unknown))}")
    missing = required - set(table)
    if missing:
        raise MissingKeyError(f"missing key(s) in [{where}]: {', '.join(sorted(missing))}")


def _quantity(value, dim: str, where: str) -> float:
    if not isinstance(value, str):
        raise UnitViolation(f"{where}: expected a quantity string like '1.0 <unit>', got {value!r}")
    try:
        return parse_quantity(value, dim)
    except UnitError as exc:
        raise UnitViolation(f"{where}: {exc}") from None


def _positive(value: float, where: str) -> float:
    if not value > 0:
        raise NonPhysicalValue(f"{where} must be positive")
    return value


def _read_table(path: Path, where: str) -> np.ndarray:
    """Two-column R,V CSV; '#' lines and one header row are skipped."""
    rows = [row for row in csv.reader(path.read_text().splitlines()) if row and not row[0].lstrip().startswith("#")]
    try:
        data = np.array(rows, dtype=float)
    except ValueError:
        try:
            data = np.array(rows[1:], dtype=float)  # header row
        except ValueError:
            raise ConfigError(f"{where}.file: {path} is not a two-column R,V CSV table") from None
    if data.ndim != 2 or data.shape[1] < 2:
        raise ConfigError(f"{where}.file: {path} is not a two-column R,V CSV table")
    return data


def _parse_curve(spec: dict, where: str, base_dir: Path):
    kind = spec.get("type")
    if kind not in _CURVE_KEYS:
        raise ConfigError(f"[{where}] type must be one of {sorted(_CURVE_KEYS)}, got {kind!r}")
    _check_keys(spec, *_CURVE_KEYS[kind], where)
    v0 = _quantity(spec.get("V0", "0 cm-1"), "energy", f"{where}.V0")
    if kind == "morse":
        return Morse(
            _positive(_quantity(spec["De"], "energy", f"{where}.De"), f"{where}.De"),
            _positive(_quantity(spec["a"], "inverse_length", f"{where}.a"), f"{where}.a"),
            _quantity(spec["Re"], "length", f"{where}.Re"),
            v0,
        )
    if kind == "harmonic":
        k = _quantity(spec["k"], "force_constant", f"{where}.k")
        if k < 0:
            raise NonPhysicalValue(f"{where}.k must be non-negative")
        return Harmonic(k, _quantity(spec["Re"], "length", f"{where}.Re"), v0)
    r_unit = spec.get("r_unit", "angstrom")
    v_unit = spec.get("v_unit", "cm-1")
    if "file" in spec:
        path = base_dir / spec["file"]
        if not path.is_file():
            raise ConfigError(f"{where}.file: {path} does not exist")
        data = _read_table(path, where)
        r_nodes, v_nodes = data[:, 0], data[:, 1]
    elif "r" in spec and "v" in spec:
        r_nodes, v_nodes = np.asarray(spec["r"], float), np.asarray(spec["v"], float)
    else:
        raise MissingKeyError(f"[{where}] tabulated curve needs 'file' or both 'r' and 'v'")
    try:
        from .units import dimension

        if dimension(r_unit) != "length" or dimension(v_unit) != "energy":
            raise UnitViolation(f"[{where}] r_unit must be a length and v_unit an energy")
        return Tabulated(tuple(to_internal(r_nodes, r_unit)), tuple(to_internal(v_nodes, v_unit)))
    except UnitError as exc:
        raise UnitViolation(f"[{where}] {exc}") from None
    except ValueError as exc:
        raise ConfigError(f"[{where}] {exc}") from None


def load_toml(text: str, source: str = "<config>") -> dict:
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigSyntaxError(f"{source}: {exc}") from None


def inline_curves(raw: dict, base_dir: Path) -> dict:
    """Copy of ``raw`` with a ``curves.file`` reference replaced by its tables."""
    raw = copy.deepcopy(raw)
    curves = raw.get("curves")
    if isinstance(curves, dict) and "file" in curves:
        path = base_dir / curves["file"]
        if not path.is_file():
            raise ConfigError(f"curves.file: {path} does not exist")
        loaded = load_toml(path.read_text(), str(path))
        merged = {k: v for k, v in loaded.items() if k in ("X", "A", "Pi")}
        unknown = set(loaded) - {"X", "A", "Pi"}
        if unknown:
            raise UnknownKeyError(f"unknown table(s) in {path}: {', '.join(sorted(unknown))}")
        merged.update({k: v for k, v in curves.items() if k != "file"})
        raw["curves"] = merged
    # tabulated curves read from files are carried inline so the echo is self-contained
    if isinstance(raw.get("curves"), dict):
        for name, spec in raw["curves"].items():
            if isinstance(spec, dict) and spec.get("type") == "tabulated" and "file" in spec:
                path = base_dir / spec["file"]
                if not path.is_file():
                    raise ConfigError(f"curves.{name}.file: {path} does not exist")
                data = _read_table(path, f"curves.{name}")
                spec = {k: v for k, v in spec.items() if k != "file"}
                spec["r"], spec["v"] = data[:, 0].tolist(), data[:, 1].tolist()
                raw["curves"][name] = spec
    return raw


def parse_config(text: str, base_dir: str | Path = ".") -> ScenarioConfig:
    """Parse and validate a scenario. Relative curve files resolve against ``base_dir``."""
    base_dir = Path(base_dir)
    raw = load_toml(text)
    missing = [k for k in _TOP_REQUIRED if k not in raw]
    if missing:
        raise MissingKeyError(f"missing required block(s): {', '.join(missing)}")
    unknown = set(raw) - set(_TOP_REQUIRED) - set(_TOP_OPTIONAL)
    if unknown:
        raise UnknownKeyError(f"unknown top-level key(s): {', '.join(sorted(unknown))}")
    for block, (req, opt) in _SCHEMA.items():
        if block in raw:
            _check_keys(raw[block], req, opt, block)
    raw = inline_curves(raw, base_dir)

    mass = _positive(_quantity(raw["mass"], "mass", "mass"), "mass")

    g = raw["grid"]
    units = g.get("units", "angstrom")
    try:
        from .units import dimension

        if dimension(units) != "length":
            raise UnitViolation(f"grid.units must be a length unit, got {units!r}")
        grid = make_grid(float(g["r_min"]), float(g["r_max"]), int(g["n"]), units)
    except UnitError as exc:
        raise UnitViolation(f"grid.units: {exc}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise NonPhysicalValue(f"grid: {exc}") from None

    curves = raw["curves"]
    missing = [c for c in ("X", "A", "Pi") if c not in curves]
    if missing:
        raise MissingKeyError(f"missing curve(s) in [curves]: {', '.join(missing)}")
    x, a, pi = (_parse_curve(curves[c], f"curves.{c}", base_dir) for c in ("X", "A", "Pi"))

    d = raw["drive"]
    omega = {}
    width = {}
    for i in ("1", "2"):
        key = "omega" + i if "omega" + i in d else "omega"
        if key not in d:
            raise MissingKeyError(f"[drive] needs 'omega' or 'omega{i}'")
        omega[i] = _quantity(d[key], "energy", f"drive.{key}")
        key = "width" + i if "width" + i in d else "width"
        if key not in d:
            raise MissingKeyError(f"[drive] needs 'width' or 'width{i}'")
        width[i] = _positive(_quantity(d[key], "time", f"drive.{key}"), f"drive.{key}")
    potential = CoupledPotential(
        x, a, pi,
        _quantity(d["delta1"], "energy", "drive.delta1"),
        _quantity(d["delta2"], "energy", "drive.delta2"),
        PulseEnvelope(omega["1"], _quantity(d["t1"], "time", "drive.t1"), width["1"]),
        PulseEnvelope(omega["2"], _quantity(d["t2"], "time", "drive.t2"), width["2"]),
    )

    ini = raw["initial"]
    if ini["well"] not in ("left", "right"):
        raise NonPhysicalValue(f"initial.well must be 'left' or 'right', got {ini['well']!r}")
    if not isinstance(ini["nu"], int) or ini["nu"] < 0:
        raise NonPhysicalValue("initial.nu must be a non-negative integer")

    p = raw["propagation"]
    try:
        settings = PropagationSettings(
            _positive(_quantity(p["dt"], "time", "propagation.dt"), "propagation.dt"),
            _quantity(p["t_start"], "time", "propagation.t_start"),
            _quantity(p["t_end"], "time", "propagation.t_end"),
            int(p.get("record_stride", 1)),
            tuple(_quantity(s, "time", "propagation.snapshot_times") for s in p.get("snapshot_times", [])),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise NonPhysicalValue(f"propagation: {exc}") from None

    o = raw.get("outputs", {"directory": raw.get("name", "out")})
    files = tuple(o.get("files", OUTPUT_FILES))
    bad = set(files) - set(OUTPUT_FILES)
    if bad:
        raise ConfigError(f"outputs.files: unknown file kind(s) {sorted(bad)}; known {list(OUTPUT_FILES)}")
    outputs = OutputSpec(str(o["directory"]), files)

    an = raw.get("analysis", {})
    analysis = AnalysisSpec(
        int(an.get("projection_count", 8)),
        int(an.get("lip_count", 5)),
        _positive(_quantity(an.get("lip_sample", "0.05 ps"), "time", "analysis.lip_sample"), "analysis.lip_sample"),
        tuple(_quantity(s, "time", "analysis.lip_snapshot_times") for s in an.get("lip_snapshot_times", [])),
    )
    if analysis.projection_count < 1 or analysis.lip_count < 1:
        raise NonPhysicalValue("analysis counts must be >= 1")

    return ScenarioConfig(str(raw.get("name", "scenario")), grid, mass, potential, (ini["well"], ini["nu"]),
                          settings, outputs, analysis, raw)


def load_config(path: str | Path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    return parse_config(text, path.parent)


def scenario_path(name: str) -> Path:
    """Path of a shipped scenario, e.g. ``scenario_path('fig3_tailoring')``."""
    return DATA_DIR / f"{name}.toml"


def load_scenario(name: str) -> ScenarioConfig:
    return load_config(scenario_path(name))


def dump_config(config: ScenarioConfig) -> str:
    """TOML echo of a parsed config (curves inlined) that parses back to an equal config."""
    return tomli_w.dumps(config.raw)


def set_path(raw: dict, dotted: str, value: Any) -> dict:
    """Copy of ``raw`` with ``dotted`` (e.g. 'drive.delta2') set to ``value``."""
    raw = copy.deepcopy(raw)
    node = raw
    parts = dotted.split(".")
    for part in parts[:-1]:
        if not isinstance(node, dict) or part not in node:
            raise ConfigError(f"parameter path {dotted!r} does not resolve")
        node = node[part]
    if not isinstance(node, dict):
        raise ConfigError(f"parameter path {dotted!r} does not resolve")
    block = parts[0] if len(parts) > 1 else None
    if block in _SCHEMA and len(parts) == 2:
        req, opt = _SCHEMA[block]
        if parts[1] not in req | opt:
            raise ConfigError(f"parameter path {dotted!r} is not in the config schema")
    elif parts[-1] not in node:
        raise ConfigError(f"parameter path {dotted!r} does not resolve")
    node[parts[-1]] = value
    return raw


@dataclass(frozen=True)
class ScanSpec:
    base: ScenarioConfig
    axes: tuple  # ((dotted path, (values...)), ...)
    objective: str = "final_pi_population"
    target: tuple | None = None
    job_cap: int = 256


def parse_scan(text: str, base_dir: str | Path = ".") -> ScanSpec:
    base_dir = Path(base_dir)
    raw = load_toml(text)
    _check_keys(raw, {"base", "axes"}, {"objective", "target", "job_cap"}, "scan")
    base_path = base_dir / raw["base"]
    if not base_path.is_file():
        raise ConfigError(f"scan base {base_path} does not exist")
    base = load_config(base_path)
    base = ScenarioConfig(base.name, base.grid, base.mass, base.potential, base.initial, base.propagation,
                          base.outputs, base.analysis, inline_curves(base.raw, base_path.parent))
    if not raw["axes"]:
        raise ConfigError("scan needs at least one axis")
    axes = []
    for i, ax in enumerate(raw["axes"]):
        _check_keys(ax, {"path", "values"}, set(), f"axes[{i}]")
        if not ax["values"]:
            raise ConfigError(f"axes[{i}] has no values")
        set_path(base.raw, ax["path"], ax["values"][0])
        axes.append((ax["path"], tuple(ax["values"])))
    objective = raw.get("objective", "final_pi_population")
    if objective not in OBJECTIVES:
        raise ConfigError(f"objective must be one of {OBJECTIVES}")
    target = raw.get("target")
    if objective == "final_target_weight":
        if not (isinstance(target, list) and len(target) == 2 and target[0] in ("left", "right")):
            raise ConfigError("final_target_weight needs target = [\"left\"|\"right\", nu]")
        target = (target[0], int(target[1]))
    elif target is not None:
        target = tuple(target)
    return ScanSpec(base, tuple(axes), objective, target, int(raw.get("job_cap", 256)))


def load_scan(path: str | Path) -> ScanSpec:
    path = Path(path)
    return parse_scan(path.read_text(), path.parent)
