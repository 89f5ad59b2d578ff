"""Command-line interface.

Subcommands (each takes a config file)::

    hrsync simulate  <config>   trajectory + diagnostics CSV + figure
    hrsync sync      <config>   synchronization run with bound checks
    hrsync threshold <config>   empirical coupling-threshold bisection
    hrsync converge  <config>   spatial/temporal order measurement
    hrsync oracle    <config>   PDE vs ODE comparison (constant data)
    hrsync constants <config>   print the derived-constants table

Exit codes: 0 when the run succeeds and every check passes, 1 when a
check fails or the integration aborts, 2 for usage or configuration
errors.  Messages go to stderr; data goes to files under ``--out`` (and
the constants table to stdout).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional

from .config import ConfigError, parse_run_config
from .experiments import (ExperimentReport, RunConfig,
                          bisect_empirical_threshold, convergence_study,
                          oracle_comparison, run_simulation,
                          run_sync_experiment)
from .params import compute_absorbing_constants, compute_time_avg_bounds
from .reporting import write_report, write_timeseries

__all__ = ["main"]

_COMMANDS = ("simulate", "sync", "threshold", "converge", "oracle",
             "constants")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hrsync",
        description="Simulate a pair of diffusively coupled neurons and "
                    "check the dissipativity and synchronization bounds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("config", help="path to the run configuration file")
        sp.add_argument("--out", default=".", metavar="DIR",
                        help="directory for output files (default: .)")
        sp.add_argument("--quiet", action="store_true",
                        help="suppress the stdout summary")
        sp.add_argument("--seed", type=int, default=None, metavar="N",
                        help="override the [initial] seed")
    return parser


def _load_config(args: argparse.Namespace) -> RunConfig:
    try:
        text = Path(args.config).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    config = parse_run_config(text)
    if args.seed is not None:
        config = replace(config,
                         initial=replace(config.initial, seed=args.seed))
    return config


def _summarize(report: ExperimentReport, paths: list[Path],
               quiet: bool) -> None:
    if quiet:
        return
    for key, value in report.scalars.items():
        print(f"{key} = {value:.10g}")
    for key, flag in report.passed.items():
        print(f"{key}: {'pass' if flag else 'FAIL'}")
    for path in paths:
        print(f"wrote {path}")


def _print_constants(config: RunConfig) -> None:
    params = config.params
    constants = compute_absorbing_constants(params, config.grid.volume)
    m1, m2 = compute_time_avg_bounds(params, constants)
    print("parameters:")
    for key in ("a", "b", "alpha", "beta", "q", "r", "c", "J", "d", "p"):
        print(f"  {key:7s} = {getattr(params, key):.12g}")
    print(f"derived constants (|Omega| = {constants.omega_area:.12g}):")
    rows = [
        ("C1", constants.c1), ("C2", constants.c2), ("r1", constants.r1),
        ("M", constants.m), ("K", constants.k), ("C3", constants.c3),
        ("lambda", constants.lam), ("p_star", constants.p_star),
    ]
    if constants.delta is not None:
        rows += [("delta", constants.delta), ("mu", constants.mu)]
    rows += [("M1", m1), ("M2", m2)]
    for label, value in rows:
        print(f"  {label:7s} = {value:.12g}")
    if constants.delta is None:
        print("  delta, mu undefined: p does not exceed p_star")
    print("  (M1, M2 are implementation-derived time-average bounds)")


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage error (2) or --help (0)
        return int(exc.code or 0)

    try:
        config = _load_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    out_dir = Path(args.out)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"cannot create output directory: {exc}", file=sys.stderr)
        return 2

    if args.command == "constants":
        _print_constants(config)
        return 0

    from . import figures  # deferred: pulls in matplotlib

    try:
        paths: list[Path] = []
        if args.command == "simulate":
            report = run_simulation(config)
            write_timeseries(report.records, out_dir / "timeseries.csv")
            paths.append(out_dir / "timeseries.csv")
            paths.append(figures.plot_timeseries(report.records,
                                                 out_dir / "timeseries.png"))
        elif args.command == "sync":
            report = run_sync_experiment(config)
            write_timeseries(report.records, out_dir / "timeseries.csv")
            paths.append(out_dir / "timeseries.csv")
            paths.append(figures.plot_sync_decay(report,
                                                 out_dir / "sync_decay.png"))
        elif args.command == "threshold":
            _, report = bisect_empirical_threshold(config)
            paths.append(figures.plot_threshold_trace(
                report, out_dir / "threshold_trace.png"))
        elif args.command == "converge":
            report = convergence_study(config)
            paths.append(figures.plot_convergence(report,
                                                  out_dir / "convergence.png"))
        else:  # oracle
            try:
                report = oracle_comparison(config)
            except ValueError as exc:
                print(f"config error: {exc}", file=sys.stderr)
                return 2
            paths.append(figures.plot_oracle_error(report,
                                                   out_dir / "oracle_error.png"))
    except (RuntimeError, ValueError) as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return 1

    write_report(report, out_dir / "report.txt")
    paths.append(out_dir / "report.txt")
    _summarize(report, paths, args.quiet)
    if not report.all_passed:
        if not args.quiet:
            print("one or more checks failed", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
