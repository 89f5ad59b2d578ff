"""Figure rendering for the command-line report paths.

Every function draws one PNG from already-computed results (records or
an experiment report) and returns the written path.  Rendering uses the
Agg backend, so it works headless.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

from .diagnostics import TimeSeriesRecord  # noqa: E402
from .experiments import ExperimentReport  # noqa: E402

__all__ = [
    "plot_timeseries",
    "plot_sync_decay",
    "plot_threshold_trace",
    "plot_convergence",
    "plot_oracle_error",
]

_DPI = 150


def _finish(fig, path) -> Path:
    path = Path(path)
    fig.savefig(path, dpi=_DPI, bbox_inches="tight")
    plt.close(fig)
    return path


def plot_timeseries(records: Sequence[TimeSeriesRecord], path) -> Path:
    """Four-panel overview: norms, sync functional, gradient energy."""
    t = [r.t for r in records]
    fig, axes = plt.subplots(2, 2, figsize=(9, 6), sharex=True)
    panels = [
        ("norm_g_sq", [r.norm_g_sq for r in records], "linear"),
        ("sync_L", [r.sync_L for r in records], "log"),
        ("h1_u", [r.h1_u for r in records], "linear"),
        ("weighted_norm", [r.weighted_norm for r in records], "linear"),
    ]
    for ax, (label, values, scale) in zip(axes.flat, panels):
        if scale == "log" and any(v > 0 for v in values):
            positive = [(ti, v) for ti, v in zip(t, values) if v > 0]
            ax.semilogy([q[0] for q in positive], [q[1] for q in positive])
        else:
            ax.plot(t, values)
        ax.set_ylabel(label)
        ax.grid(True, alpha=0.3)
    for ax in axes[-1]:
        ax.set_xlabel("t")
    fig.suptitle("trajectory diagnostics")
    return _finish(fig, path)


def plot_sync_decay(report: ExperimentReport, path) -> Path:
    """Synchronization distance against its exponential envelope."""
    records = report.records
    t0 = records[0].t
    t = np.array([r.t for r in records])
    lam = report.scalars.get("lambda", 1.0)
    lo, hi = min(1.0, lam), max(1.0, lam)
    lhs = lo * np.array([r.sync_dist_sq for r in records])
    fig, ax = plt.subplots(figsize=(7, 4.5))
    mask = lhs > 0
    ax.semilogy(t[mask], lhs[mask], label="min{1,lambda} * sync_dist_sq")
    mu = report.scalars.get("mu_analytic")
    if mu is not None and records[0].sync_dist_sq > 0:
        envelope = 1.05 * hi * records[0].sync_dist_sq \
            * np.exp(-mu * (t - t0))
        ax.semilogy(t, envelope, "--", label="decay envelope (with slack)")
    ax.set_xlabel("t")
    ax.set_ylabel("squared distance")
    ax.grid(True, alpha=0.3)
    ax.legend()
    ax.set_title("synchronization decay")
    return _finish(fig, path)


def plot_threshold_trace(report: ExperimentReport, path) -> Path:
    """Criterion ratio per evaluated coupling strength."""
    p_values = report.series.get("trace_p", [])
    ratios = report.series.get("trace_ratio", [])
    fig, ax = plt.subplots(figsize=(7, 4.5))
    positive = [(p, r) for p, r in zip(p_values, ratios) if r > 0]
    if positive:
        ax.semilogy([q[0] for q in positive], [q[1] for q in positive],
                    "o", label="sync_L(T) / sync_L(0)")
    epsilon = report.scalars.get("epsilon")
    if epsilon:
        ax.axhline(epsilon, color="gray", linestyle=":",
                   label="criterion epsilon")
    p_star = report.scalars.get("p_star")
    if p_star is not None and np.isfinite(p_star):
        ax.axvline(p_star, color="tab:red", linestyle="--",
                   label="analytic threshold")
    p_emp = report.scalars.get("p_emp")
    if p_emp is not None:
        ax.axvline(p_emp, color="tab:green", linestyle="-.",
                   label="empirical result")
    ax.set_xlabel("coupling strength p")
    ax.set_ylabel("criterion ratio")
    ax.grid(True, alpha=0.3)
    ax.legend()
    ax.set_title("threshold bisection trace")
    return _finish(fig, path)


def plot_convergence(report: ExperimentReport, path) -> Path:
    """Spatial and temporal error decay on log-log axes."""
    fig, (ax_s, ax_t) = plt.subplots(1, 2, figsize=(10, 4.5))
    hs = report.series.get("spatial_h", [])
    errs = report.series.get("spatial_error", [])
    if hs:
        ax_s.loglog(hs, errs, "o-", label="stencil error")
        ref = [errs[0] * (h / hs[0]) ** 2 for h in hs]
        ax_s.loglog(hs, ref, "--", color="gray", label="order 2 reference")
    ax_s.set_xlabel("h")
    ax_s.set_ylabel("error")
    ax_s.set_title(f"spatial (order {report.scalars.get('spatial_order', 0):.2f})")
    ax_s.grid(True, alpha=0.3)
    ax_s.legend()
    for scheme, style in (("imex_euler", "o-"), ("imex_strang", "s-")):
        dts = report.series.get(f"temporal_dt_{scheme}", [])
        errs_t = report.series.get(f"temporal_error_{scheme}", [])
        if dts:
            order = report.scalars.get(f"temporal_order_{scheme}", 0.0)
            ax_t.loglog(dts, errs_t, style,
                        label=f"{scheme} (order {order:.2f})")
    ax_t.set_xlabel("dt")
    ax_t.set_ylabel("self-convergence error")
    ax_t.set_title("temporal")
    ax_t.grid(True, alpha=0.3)
    ax_t.legend()
    return _finish(fig, path)


def plot_oracle_error(report: ExperimentReport, path) -> Path:
    """Sup-norm PDE-versus-ODE error over time."""
    t = report.series.get("t", [])
    err = report.series.get("sup_error", [])
    fig, ax = plt.subplots(figsize=(7, 4.5))
    positive = [(ti, e) for ti, e in zip(t, err) if e > 0]
    if positive:
        ax.semilogy([q[0] for q in positive], [q[1] for q in positive])
    tol = report.scalars.get("tolerance")
    if tol:
        ax.axhline(tol, color="tab:red", linestyle="--", label="tolerance")
        ax.legend()
    ax.set_xlabel("t")
    ax.set_ylabel("sup error")
    ax.grid(True, alpha=0.3)
    ax.set_title("PDE vs ODE oracle")
    return _finish(fig, path)
