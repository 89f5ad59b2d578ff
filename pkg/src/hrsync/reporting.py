"""Deterministic file output: diagnostic CSV and experiment reports.

Both writers are pure functions of their inputs — fixed decimal
formatting, no timestamps — so re-running the same configuration
produces byte-identical files.
"""

from __future__ import annotations

import io
from os import PathLike
from typing import Sequence, TextIO, Union

from .config import render_run_config
from .diagnostics import TimeSeriesRecord
from .experiments import ExperimentReport

__all__ = ["TIMESERIES_HEADER", "write_timeseries", "write_report",
           "render_report"]

TIMESERIES_HEADER = "t,norm_g_sq,sync_L,sync_dist_sq,h1_u,weighted_norm"

Sink = Union[str, PathLike, TextIO]


def _write_text(sink: Sink, text: str) -> None:
    if hasattr(sink, "write"):
        sink.write(text)
    else:
        with open(sink, "w", encoding="utf-8") as handle:
            handle.write(text)


def _g17(value: float) -> str:
    return f"{value:.17g}"


def write_timeseries(records: Sequence[TimeSeriesRecord], sink: Sink) -> None:
    """Write the sampled diagnostics as comma-separated text.

    One row per record in time order, 17 significant digits (lossless
    for doubles).  Refuses an empty record list.
    """
    if not records:
        raise ValueError("no records to write")
    out = io.StringIO()
    out.write(TIMESERIES_HEADER + "\n")
    for rec in records:
        out.write(",".join(_g17(v) for v in (
            rec.t, rec.norm_g_sq, rec.sync_L, rec.sync_dist_sq, rec.h1_u,
            rec.weighted_norm)) + "\n")
    _write_text(sink, out.getvalue())


def render_report(report: ExperimentReport) -> str:
    """Render a report: prose summary, config echo, key=value results.

    The trailing block holds one ``key=value`` line per scalar result,
    pass/fail flag, and bound detail, for machine consumption.
    """
    lines = [f"hrsync report: {report.name}",
             "=" * (len(report.name) + 15), ""]

    if report.notes:
        lines.append("notes:")
        lines.extend(f"  - {note}" for note in report.notes)
        lines.append("")

    if report.bounds:
        lines.append("bound checks:")
        for b in report.bounds:
            verdict = "holds" if b.passed else "VIOLATED"
            lines.append(
                f"  - {b.name}: {verdict} at {b.fraction:.4f} of samples; "
                f"worst margin {b.worst_margin:.6g} at t = {b.worst_time:g}"
            )
        lines.append("")

    lines.append("configuration (reproduces this run):")
    lines.extend("  " + cfg_line
                 for cfg_line in render_run_config(report.config).splitlines())
    lines.append("")

    lines.append("results:")
    for key, value in report.scalars.items():
        lines.append(f"{key}={_g17(float(value))}")
    for key, flag in report.passed.items():
        lines.append(f"{key}={'pass' if flag else 'fail'}")
    for b in report.bounds:
        key = f"{b.name}_bound"
        if key not in report.passed:
            lines.append(f"{key}={'pass' if b.passed else 'fail'}")
        lines.append(f"{b.name}_fraction={_g17(b.fraction)}")
        lines.append(f"{b.name}_worst_margin={_g17(b.worst_margin)}")
        lines.append(f"{b.name}_worst_time={_g17(b.worst_time)}")
    lines.append("")
    return "\n".join(lines)


def write_report(report: ExperimentReport, sink: Sink) -> None:
    """Write the rendered report to a path or open text sink."""
    _write_text(sink, render_report(report))
