"""Trajectory diagnostics and the quantitative bound checks.

``record_diagnostics`` reduces one state to the handful of scalars the
estimates speak about: the squared state norm, the synchronization
functional and distance, the u-gradient energy, and the weighted energy
composite.  The ``check_*`` functions then test a recorded series
against each closed-form inequality — the global norm bound, absorbing-
ball entry, the exponential synchronization bound, and the unit-window
time-average energy bound — reporting the fraction of samples that
satisfy the bound and the worst signed margin.

Everything operates on immutable records; no integration happens here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .dynamics import PairState
from .grid import Grid, h1_seminorm_sq, l2_norm_sq
from .params import (DerivedConstants, Parameters, compute_absorb_entry_time,
                     compute_delta_mu)

__all__ = [
    "TimeSeriesRecord",
    "BoundReport",
    "record_diagnostics",
    "check_global_bound",
    "check_absorbing_entry",
    "check_gronwall_sync",
    "check_time_avg_energy",
    "fit_decay_rate",
    "first_monotone_time",
]


@dataclass(frozen=True)
class TimeSeriesRecord:
    """Scalar diagnostics of one state at one sample time.

    norm_g_sq     -- squared norm of all six fields
    sync_L        -- lam*|U|^2 + |V|^2 + |W|^2 (synchronization functional)
    sync_dist_sq  -- |U|^2 + |V|^2 + |W|^2 (squared distance between neurons)
    h1_u          -- |grad u1|^2 + |grad u2|^2
    weighted_norm -- c1*(|u1|^2+|u2|^2) + |v1|^2+|v2|^2 + |w1|^2+|w2|^2
    """

    t: float
    norm_g_sq: float
    sync_L: float
    sync_dist_sq: float
    h1_u: float
    weighted_norm: float


@dataclass(frozen=True)
class BoundReport:
    """Outcome of checking one inequality along a sampled trajectory.

    ``worst_margin`` is bound minus observed (negative means violated)
    at the sample time ``worst_time``; ``fraction`` is the share of
    checked samples satisfying the bound.
    """

    name: str
    fraction: float
    worst_margin: float
    worst_time: float

    @property
    def passed(self) -> bool:
        return self.fraction == 1.0


def record_diagnostics(grid: Grid, params: Parameters,
                       constants: DerivedConstants, s: PairState,
                       t: float) -> TimeSeriesRecord:
    """Reduce one state to the scalar diagnostics at time ``t``."""
    u1_sq = l2_norm_sq(grid, s.u1)
    v1_sq = l2_norm_sq(grid, s.v1)
    w1_sq = l2_norm_sq(grid, s.w1)
    u2_sq = l2_norm_sq(grid, s.u2)
    v2_sq = l2_norm_sq(grid, s.v2)
    w2_sq = l2_norm_sq(grid, s.w2)
    U_sq = l2_norm_sq(grid, s.u1 - s.u2)
    V_sq = l2_norm_sq(grid, s.v1 - s.v2)
    W_sq = l2_norm_sq(grid, s.w1 - s.w2)
    return TimeSeriesRecord(
        t=float(t),
        norm_g_sq=u1_sq + v1_sq + w1_sq + u2_sq + v2_sq + w2_sq,
        sync_L=constants.lam * U_sq + V_sq + W_sq,
        sync_dist_sq=U_sq + V_sq + W_sq,
        h1_u=h1_seminorm_sq(grid, s.u1) + h1_seminorm_sq(grid, s.u2),
        weighted_norm=(constants.c1 * (u1_sq + u2_sq)
                       + v1_sq + v2_sq + w1_sq + w2_sq),
    )


def _worst(name: str, margins: Sequence[float],
           times: Sequence[float], strict: bool = False) -> BoundReport:
    margins_arr = np.asarray(margins, dtype=float)
    ok = margins_arr > 0.0 if strict else margins_arr >= 0.0
    i = int(np.argmin(margins_arr))
    return BoundReport(name=name, fraction=float(np.mean(ok)),
                       worst_margin=float(margins_arr[i]),
                       worst_time=float(times[i]))


def check_global_bound(series: Sequence[TimeSeriesRecord],
                       constants: DerivedConstants,
                       g0_norm_sq: float) -> BoundReport:
    """Check the uniform-in-time norm bound along the series:

        |g(t)|^2 <= (max{c1,1}/min{c1,1}) * |g(0)|^2
                    + m * |Omega| / min{c1,1}.
    """
    if not series:
        raise ValueError("empty diagnostic series")
    c1 = constants.c1
    bound = (max(c1, 1.0) / min(c1, 1.0)) * g0_norm_sq \
        + constants.m * constants.omega_area / min(c1, 1.0)
    margins = [bound - rec.norm_g_sq for rec in series]
    times = [rec.t for rec in series]
    return _worst("global", margins, times)


def check_absorbing_entry(series: Sequence[TimeSeriesRecord],
                          constants: DerivedConstants,
                          R: float) -> BoundReport:
    """Check |g(t)|^2 < k strictly for every sample past the entry time.

    The entry time is computed from the initial-set radius ``R``
    (squared norm).  Raises when the series does not extend past it.
    """
    if not series:
        raise ValueError("empty diagnostic series")
    t0_entry = compute_absorb_entry_time(constants, R)
    horizon = series[-1].t
    if horizon <= t0_entry:
        raise ValueError(
            f"horizon shorter than T0: series ends at t = {horizon:g} but "
            f"absorbing entry needs t > {t0_entry:g} "
            f"(decay timescale 1/r1 = {1.0 / constants.r1:g})"
        )
    tail = [rec for rec in series if rec.t > t0_entry]
    margins = [constants.k - rec.norm_g_sq for rec in tail]
    times = [rec.t for rec in tail]
    return _worst("absorbing", margins, times, strict=True)


def check_gronwall_sync(series: Sequence[TimeSeriesRecord],
                        params: Parameters, constants: DerivedConstants,
                        p: float, initial_dist_sq: float,
                        slack: float = 1.05) -> BoundReport:
    """Check the exponential synchronization bound at every sample:

        min{1,lam} * |g1(t)-g2(t)|^2
            <= slack * exp(-mu*t) * max{1,lam} * |g1(0)-g2(0)|^2.

    Requires p above the analytic threshold (that is where the bound is
    guaranteed); the multiplicative ``slack`` absorbs discretization
    error in the trajectory.
    """
    if not series:
        raise ValueError("empty diagnostic series")
    _, mu = compute_delta_mu(params, p)  # raises when p is below threshold
    lam = constants.lam
    lo, hi = min(1.0, lam), max(1.0, lam)
    t_ref = series[0].t
    margins = []
    for rec in series:
        envelope = slack * math.exp(-mu * (rec.t - t_ref)) * hi * initial_dist_sq
        margins.append(envelope - lo * rec.sync_dist_sq)
    times = [rec.t for rec in series]
    return _worst("gronwall", margins, times)


def check_time_avg_energy(series: Sequence[TimeSeriesRecord],
                          constants: DerivedConstants,
                          m1: float, m2: float,
                          g0_norm_sq: float) -> BoundReport:
    """Check the unit-window time-average energy bound:

        integral over [t0, t0+1] of (|g|^2 + |grad u1|^2 + |grad u2|^2) dt
            <= m1 * |g(0)|^2 + m2 * |Omega|.

    The integral is taken with the trapezoid rule over the samples that
    fall in the window; the series must cover at least one time unit.
    """
    if not series:
        raise ValueError("empty diagnostic series")
    t0 = series[0].t
    window = [rec for rec in series if rec.t <= t0 + 1.0 + 1e-12]
    if len(window) < 2 or window[-1].t < t0 + 1.0 - 1e-9:
        raise ValueError("series does not cover a full unit time window")
    times = np.array([rec.t for rec in window])
    energy = np.array([rec.norm_g_sq + rec.h1_u for rec in window])
    integral = float(np.trapezoid(energy, times))
    bound = m1 * g0_norm_sq + m2 * constants.omega_area
    return BoundReport(name="time_avg_energy", fraction=1.0 if
                       bound - integral >= 0.0 else 0.0,
                       worst_margin=bound - integral,
                       worst_time=float(times[-1]))


def fit_decay_rate(series: Sequence[TimeSeriesRecord], t_start: float,
                   t_end: float) -> tuple[float, float]:
    """Least-squares decay rate of the synchronization functional.

    Fits -ln(sync_L) against t over the window [t_start, t_end] and
    returns (rate, rms residual of the fit).  Raises when the window is
    empty or the functional has already underflowed to zero there.
    """
    if not t_end > t_start:
        raise ValueError("t_end must exceed t_start")
    window = [rec for rec in series if t_start <= rec.t <= t_end]
    if len(window) < 2:
        raise ValueError("fit window contains fewer than two samples")
    if any(rec.sync_L <= 0.0 for rec in window):
        raise ValueError("fully synchronized before window: sync_L reached 0")
    t = np.array([rec.t for rec in window])
    y = -np.log(np.array([rec.sync_L for rec in window]))
    slope, intercept = np.polyfit(t, y, 1)
    fitted = slope * t + intercept
    residual = float(np.sqrt(np.mean((y - fitted) ** 2)))
    return float(slope), residual


def first_monotone_time(series: Sequence[TimeSeriesRecord],
                        rel_tol: float = 1e-9) -> Optional[float]:
    """Earliest sample time after which sync_L never increases.

    An increase smaller than ``rel_tol`` relative to the local value is
    ignored.  Returns None when the last step still increases.
    """
    if not series:
        raise ValueError("empty diagnostic series")
    idx = 0
    for j in range(len(series) - 1):
        a, b = series[j].sync_L, series[j + 1].sync_L
        if b > a * (1.0 + rel_tol) + 1e-300:
            idx = j + 1
    if idx >= len(series) - 1 and len(series) > 1:
        return None
    return series[idx].t
