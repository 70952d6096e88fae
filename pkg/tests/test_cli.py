import json

import numpy as np
import pytest

from lipdyn.cli import main
from lipdyn.config import load_config
from lipdyn.io import read_densities


@pytest.fixture
def cfg(tmp_path, small_config_text):
    p = tmp_path / "small.toml"
    p.write_text(small_config_text)
    return p


def test_run_writes_outputs(cfg, tmp_path):
    out = tmp_path / "out"
    assert main(["run", str(cfg), "--out", str(out), "--quiet"]) == 0
    for name in ("populations.csv", "densities.bin", "transfer_report.csv", "final_projections.csv",
                 "lip_energies.csv", "events.csv", "config_echo.toml", "metadata.json"):
        assert (out / name).is_file(), name
    pops = np.loadtxt(out / "populations.csv", delimiter=",", skiprows=1)
    np.testing.assert_allclose(pops[:, 4], 1.0, atol=1e-12)
    np.testing.assert_allclose(pops[:, 1:4].sum(axis=1), pops[:, 4], atol=1e-14)
    _, _, times, channels, _ = read_densities(out / "densities.bin")
    np.testing.assert_allclose(times, [0.0, 0.2])  # the requested snapshot times
    assert (out / "transfer_report.csv").read_text().startswith("initial_well,initial_nu,final_well")
    meta = json.loads((out / "metadata.json").read_text())
    assert meta["grid"]["n"] == 128
    # the echo reproduces the run configuration
    assert load_config(out / "config_echo.toml").raw == load_config(cfg).raw


def test_dt_override(cfg, tmp_path):
    out = tmp_path / "o"
    assert main(["run", str(cfg), "--out", str(out), "--dt", "4 fs", "--quiet"]) == 0
    assert 'dt = "4 fs"' in (out / "config_echo.toml").read_text()
    assert main(["run", str(cfg), "--out", str(out), "--dt", "4 cm-1", "--quiet"]) == 2


def test_threads_do_not_change_output(cfg, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["run", str(cfg), "--out", str(a), "--threads", "1", "--quiet"]) == 0
    assert main(["run", str(cfg), "--out", str(b), "--threads", "2", "--quiet"]) == 0
    for name in ("populations.csv", "transfer_report.csv", "lip_energies.csv", "events.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_config_error_exit(tmp_path, cfg):
    bad = tmp_path / "bad.toml"
    bad.write_text(cfg.read_text().replace("n = 128", "n = 100"))
    assert main(["run", str(bad), "--quiet"]) == 2
    assert main(["run", str(tmp_path / "missing.toml"), "--quiet"]) == 2


def test_io_error_exit(cfg, tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("")
    assert main(["run", str(cfg), "--out", str(blocker), "--quiet"]) == 4


def test_numerical_failure_exit(cfg, tmp_path):
    # with the grid inside the X well only, the Pi curve has no bound states
    narrow = tmp_path / "narrow.toml"
    narrow.write_text(cfg.read_text().replace("r_min = 2.0", "r_min = 2.95").replace("r_max = 10.0", "r_max = 3.25"))
    assert main(["run", str(narrow), "--out", str(tmp_path / "o"), "--quiet"]) == 3


def test_boundary_watchdog_exit(cfg, tmp_path):
    text = cfg.read_text()
    i, j = text.index("[curves.X]"), text.index("[curves.A]")
    broad = text[:i] + '[curves.X]\ntype = "harmonic"\nk = "1.0 cm-1/angstrom^2"\nRe = "6.0 angstrom"\n\n' + text[j:]
    p = tmp_path / "broad.toml"
    p.write_text(broad)
    out = tmp_path / "o"
    assert main(["run", str(p), "--out", str(out), "--quiet"]) == 5
    assert (out / "transfer_report.csv").read_text().splitlines()[1].endswith(",1")


def test_scan(tmp_path, cfg):
    spec = tmp_path / "scan.toml"
    spec.write_text('base = "small.toml"\n[[axes]]\npath = "drive.delta2"\nvalues = ["-2010 cm-1", "-1960 cm-1"]\n'
                    '[[axes]]\npath = "drive.omega"\nvalues = ["500 cm-1", "733 cm-1"]\n')
    out = tmp_path / "scan.csv"
    assert main(["scan", str(spec), "--out", str(out), "--quiet"]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("drive.delta2,drive.omega,objective")
    assert [l.split(",")[:2] for l in lines[1:]] == [["-2010 cm-1", "500 cm-1"], ["-2010 cm-1", "733 cm-1"],
                                                     ["-1960 cm-1", "500 cm-1"], ["-1960 cm-1", "733 cm-1"]]
    out2 = tmp_path / "scan2.csv"
    assert main(["scan", str(spec), "--out", str(out2), "--threads", "2", "--quiet"]) == 0
    assert out2.read_bytes() == out.read_bytes()
    spec.write_text(spec.read_text().replace('base = "small.toml"', 'base = "small.toml"\njob_cap = 3'))
    assert main(["scan", str(spec), "--out", str(out), "--quiet"]) == 2


def test_eigen(cfg, tmp_path, capsys):
    assert main(["eigen", str(cfg), "--surface", "X", "--count", "3", "--out", str(tmp_path), "--states"]) == 0
    rows = np.loadtxt(tmp_path / "eigen_X.csv", delimiter=",", skiprows=1)
    assert rows.shape == (3, 2)
    assert np.all(np.diff(rows[:, 1]) > 0)
    assert (tmp_path / "eigen_X_states.csv").is_file()
    assert "cm-1" in capsys.readouterr().out
    assert main(["eigen", str(cfg), "--surface", "active", "--count", "3", "--t", "0.9", "--out", str(tmp_path),
                 "--quiet"]) == 0
    assert main(["eigen", str(cfg), "--surface", "Pi", "--count", "500", "--out", str(tmp_path), "--quiet"]) == 3


def test_lip(cfg, tmp_path):
    assert main(["lip", str(cfg), "--times", "0", "0.9", "--out", str(tmp_path), "--quiet"]) == 0
    rows = np.loadtxt(tmp_path / "lip_surfaces.csv", delimiter=",", skiprows=1)
    assert rows.shape == (256, 6)
    assert np.all(np.diff(rows[:, 2:5], axis=1) >= 0)
    assert (tmp_path / "lip_energies.csv").is_file()


def test_named_scenario_resolves(tmp_path):
    assert main(["eigen", "fig3_tailoring", "--surface", "X", "--count", "2", "--out", str(tmp_path), "--quiet"]) == 0
