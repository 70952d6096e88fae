"""Command line entry point.

    lipdyn run <config> [--out DIR] [--threads N] [--dt "0.25 fs"] [--quiet]
    lipdyn scan <scanspec> [--out FILE]
    lipdyn eigen <config> --surface {X,A,Pi,active} --count N [--t PS] [--states]
    lipdyn lip <config> --times PS [PS ...] [--no-track]

A shipped scenario can be named instead of a path (e.g. ``fig3_tailoring``).

Exit codes: 0 ok, 2 config error, 3 numerical failure, 4 I/O error,
5 boundary-contamination watchdog.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .config import SCENARIOS, ConfigError, load_config, load_scan, scenario_path
from .eigensolve import UnboundRequest
from .io import OutputError
from .potentials import DomainError
from .propagator import PropagationError
from .runner import (EXIT_CONFIG, EXIT_IO, EXIT_NUMERICAL, EXIT_OK, SURFACES, ScanTooLarge, eigen_command,
                     lip_command, run_scan, run_scenario)
from .units import UnitError, from_internal, parse_quantity, to_internal

log = logging.getLogger("lipdyn")


def _resolve(path: str) -> Path:
    p = Path(path)
    if not p.exists() and path in SCENARIOS:
        return scenario_path(path)
    return p


def _load(path: str, dt: str | None = None):
    config = load_config(_resolve(path))
    if dt is not None:
        try:
            new_dt = parse_quantity(dt, "time")
        except UnitError as exc:
            raise ConfigError(f"--dt: {exc}") from None
        raw = dict(config.raw)
        raw["propagation"] = dict(raw["propagation"], dt=dt)
        config = replace(config, propagation=replace(config.propagation, dt=new_dt), raw=raw)
    return config


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lipdyn", description="Wave-packet dynamics in light-induced potentials")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output directory (file for scan)")
    common.add_argument("--threads", type=int, default=1, help="worker threads; affects speed only")
    common.add_argument("--dt", help="override the time step, e.g. '0.5 fs'")
    common.add_argument("--quiet", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", parents=[common], help="propagate a scenario")
    p.add_argument("config")

    p = sub.add_parser("scan", parents=[common], help="run a parameter scan")
    p.add_argument("scanspec")

    p = sub.add_parser("eigen", parents=[common], help="bound states of a curve or the active LIP")
    p.add_argument("config")
    p.add_argument("--surface", choices=SURFACES, default="X")
    p.add_argument("--count", type=int, default=7)
    p.add_argument("--t", type=float, default=0.0, help="time in ps for the active surface")
    p.add_argument("--states", action="store_true", help="also write the eigenfunctions")

    p = sub.add_parser("lip", parents=[common], help="LIP surfaces and tracked eigenenergies")
    p.add_argument("config")
    p.add_argument("--times", type=float, nargs="+", default=[0.0], help="times in ps")
    p.add_argument("--no-track", action="store_true", help="skip eigenenergy tracking")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="%(message)s")
    try:
        return _dispatch(args)
    except (ConfigError, UnitError, ScanTooLarge) as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    except (PropagationError, UnboundRequest, DomainError, FloatingPointError) as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERICAL
    except (OutputError, OSError) as exc:
        log.error("I/O error: %s", exc)
        return EXIT_IO


def _dispatch(args) -> int:
    if args.command == "run":
        config = _load(args.config, args.dt)
        out = args.out or config.outputs.directory
        last = [-1]

        def progress(k, n):
            pct = 100 * k // n
            if pct >= last[0] + 10:
                last[0] = pct
                log.info("%s: %d%%", config.name, pct)

        run = run_scenario(config, out, threads=args.threads, progress=None if args.quiet else progress)
        rep = run.report
        log.info("final state %s nu=%d weight %.4f; P_X %.4f P_A %.4f P_Pi %.4f -> %s",
                 rep.final[0], rep.final[1], rep.final_weight, *rep.final_populations, out)
        if run.exit_code:
            log.warning("boundary watchdog: density reached the grid edge")
        return run.exit_code

    if args.command == "scan":
        scan = load_scan(args.scanspec)
        out = args.out or "scan.csv"
        rows = run_scan(scan, out, threads=args.threads)
        log.info("%d scan cells -> %s", len(rows), out)
        return EXIT_OK

    if args.command == "eigen":
        config = _load(args.config)
        out = args.out or config.outputs.directory
        basis = eigen_command(config, args.surface, args.count, to_internal(args.t, "ps"), out, args.states)
        if not args.quiet:
            for i, e in enumerate(from_internal(basis.energies, "cm-1")):
                print(f"{i}\t{e:.6f} cm-1")
        return EXIT_OK

    if args.command == "lip":
        config = _load(args.config, args.dt)
        out = args.out or config.outputs.directory
        lip_command(config, args.times, out, threads=args.threads, track_states=not args.no_track)
        log.info("LIP output -> %s", out)
        return EXIT_OK
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
