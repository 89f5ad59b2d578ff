"""Time integration: IMEX stepping for the PDE and an RK4 ODE oracle.

Diffusion is the only stiff part of the model, so both schemes treat it
implicitly and keep the polynomial reaction and the coupling explicit:

* ``imex-euler``  — explicit Euler for reaction + coupling, then a
  backward-Euler diffusion solve on the u-fields; first order.
* ``imex-strang`` — a symmetric splitting: half-step RK4 on
  reaction + coupling, Crank-Nicolson diffusion over the full step,
  half-step RK4 again; second order.

For spatially constant data the diffusion solve is the identity and the
discrete flow reduces to the classical six-dimensional ODE, which
``rk4_ode_step`` / ``integrate_ode`` integrate independently — that
pairing is the oracle used to validate the PDE path.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from .diagnostics import TimeSeriesRecord, record_diagnostics
from .dynamics import PairState, reaction_rhs
from .grid import Grid, helmholtz_solver, laplacian_apply
from .params import Parameters, compute_absorbing_constants

__all__ = [
    "SCHEMES",
    "StepperConfig",
    "ImexStepper",
    "imex_step",
    "integrate",
    "OdePoint",
    "rk4_ode_step",
    "integrate_ode",
]

SCHEMES = ("imex-euler", "imex-strang")


@dataclass(frozen=True)
class StepperConfig:
    """Time-step size, scheme tag, and finiteness-check interval."""

    dt: float
    scheme: str = "imex-euler"
    check_interval: int = 100

    def __post_init__(self) -> None:
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.scheme not in SCHEMES:
            raise ValueError(
                f"unknown scheme {self.scheme!r}; expected one of {SCHEMES}"
            )
        if self.check_interval < 1:
            raise ValueError("check_interval must be at least 1")


def _explicit_rate(params: Parameters, data: np.ndarray) -> np.ndarray:
    """Reaction plus coupling rate on the raw (6, ...) array."""
    rate = reaction_rhs(params, PairState(data)).data
    exchange = params.p * (data[3] - data[0])
    rate[0] += exchange
    rate[3] -= exchange
    return rate


def _rk4_explicit(params: Parameters, data: np.ndarray,
                  dt: float) -> np.ndarray:
    """Classical RK4 step of the explicit (non-diffusive) part."""
    k1 = _explicit_rate(params, data)
    k2 = _explicit_rate(params, data + (0.5 * dt) * k1)
    k3 = _explicit_rate(params, data + (0.5 * dt) * k2)
    k4 = _explicit_rate(params, data + dt * k3)
    return data + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


class ImexStepper:
    """One-step map for a fixed grid, parameter set, and stepper config.

    Caches the diffusion solve, so repeated stepping costs no repeated
    setup.  Instances are safe to share across sequential integrations;
    a single integration must not be advanced from two threads.
    """

    def __init__(self, grid: Grid, params: Parameters,
                 config: StepperConfig) -> None:
        self.grid = grid
        self.params = params
        self.config = config
        dt, d = config.dt, params.d
        if config.scheme == "imex-euler":
            self._solve = helmholtz_solver(grid, dt * d)
        else:
            self._gamma = 0.5 * dt * d
            self._solve = helmholtz_solver(grid, self._gamma)

    def step(self, s: PairState) -> PairState:
        if s.data.shape[1:] != self.grid.shape:
            raise ValueError(
                f"state shape {s.data.shape} does not match grid "
                f"shape {self.grid.shape}"
            )
        dt = self.config.dt
        if self.config.scheme == "imex-euler":
            out = s.data + dt * _explicit_rate(self.params, s.data)
            out[[0, 3]] = self._solve(out[[0, 3]])
            return PairState(out)
        # imex-strang: half reaction, Crank-Nicolson diffusion, half reaction
        out = _rk4_explicit(self.params, s.data, 0.5 * dt)
        u = out[[0, 3]]
        out[[0, 3]] = self._solve(u + self._gamma * laplacian_apply(self.grid, u))
        out = _rk4_explicit(self.params, out, 0.5 * dt)
        return PairState(out)


def imex_step(grid: Grid, params: Parameters, s: PairState, dt: float,
              scheme: str = "imex-euler") -> PairState:
    """Advance one step (one-shot convenience; see :class:`ImexStepper`)."""
    return ImexStepper(grid, params, StepperConfig(dt=dt, scheme=scheme)).step(s)


def integrate(grid: Grid, params: Parameters, s0: PairState, T: float,
              stepper: StepperConfig, sample_every: int = 1,
              observer: Optional[Callable[[float, TimeSeriesRecord,
                                           PairState], None]] = None,
              t0: float = 0.0,
              ) -> tuple[list[TimeSeriesRecord], PairState]:
    """March the state from ``t0`` to ``t0 + T`` and sample diagnostics.

    Returns the list of records (always including the initial and final
    times) and the final state.  ``observer(t, record, state)`` is
    called at every sample; it must not mutate the state.  The run is
    deterministic: identical inputs give bit-identical outputs.

    Raises RuntimeError when a finiteness check fails, reporting the
    failing step and the last time known finite.
    """
    if not T > 0:
        raise ValueError("T must be positive")
    if sample_every < 1:
        raise ValueError("sample_every must be at least 1")
    dt = stepper.dt
    n_steps = max(1, round(T / dt))
    constants = compute_absorbing_constants(params, omega_area=grid.volume)
    engine = ImexStepper(grid, params, stepper)

    s = s0
    records = [record_diagnostics(grid, params, constants, s, t0)]
    if observer is not None:
        observer(t0, records[0], s)
    last_finite_t = t0
    for k in range(1, n_steps + 1):
        t = t0 + k * dt
        try:
            s = engine.step(s)
        except (ValueError, FloatingPointError) as exc:
            # the diffusion solve rejects infs/NaNs from the explicit stage
            raise RuntimeError(
                f"non-finite state at step {k} (t = {t:g}); "
                f"last finite time t = {last_finite_t:g}"
            ) from exc
        at_sample = k % sample_every == 0 or k == n_steps
        if k % stepper.check_interval == 0 or at_sample:
            if not s.is_finite():
                raise RuntimeError(
                    f"non-finite state at step {k} (t = {t:g}); "
                    f"last finite time t = {last_finite_t:g}"
                )
            last_finite_t = t
        if at_sample:
            rec = record_diagnostics(grid, params, constants, s, t)
            records.append(rec)
            if observer is not None:
                observer(t, rec, s)
    return records, s


class OdePoint(NamedTuple):
    """Spatially homogeneous state: one scalar per field."""

    u1: float
    v1: float
    w1: float
    u2: float
    v2: float
    w2: float


def _ode_rhs(params: Parameters, y: np.ndarray) -> np.ndarray:
    # Deliberately self-contained (not routed through the PDE rate
    # functions) so the comparison against the PDE path is independent.
    a, b, alpha, beta = params.a, params.b, params.alpha, params.beta
    q, r, c, J, p = params.q, params.r, params.c, params.J, params.p
    u1, v1, w1, u2, v2, w2 = y
    return np.array([
        a * u1 ** 2 - b * u1 ** 3 + v1 - w1 + J + p * (u2 - u1),
        alpha - v1 - beta * u1 ** 2,
        q * (u1 - c) - r * w1,
        a * u2 ** 2 - b * u2 ** 3 + v2 - w2 + J + p * (u1 - u2),
        alpha - v2 - beta * u2 ** 2,
        q * (u2 - c) - r * w2,
    ])


def _rk4_ode(params: Parameters, y: np.ndarray, dt: float) -> np.ndarray:
    k1 = _ode_rhs(params, y)
    k2 = _ode_rhs(params, y + (0.5 * dt) * k1)
    k3 = _ode_rhs(params, y + (0.5 * dt) * k2)
    k4 = _ode_rhs(params, y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_ode_step(params: Parameters, y: OdePoint, dt: float) -> OdePoint:
    """One classical fourth-order step of the six-dimensional ODE."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    return OdePoint(*_rk4_ode(params, np.array(y, dtype=float), dt))


def integrate_ode(params: Parameters, y0: OdePoint, T: float, dt: float,
                  sample_every: int = 1) -> list[tuple[float, OdePoint]]:
    """Integrate the six-dimensional ODE, sampling every few steps.

    Returns (t, point) pairs including t = 0 and the final time;
    deterministic.  Aborts with the time stamp on non-finite values.
    """
    if not T > 0:
        raise ValueError("T must be positive")
    if not dt > 0:
        raise ValueError("dt must be positive")
    if sample_every < 1:
        raise ValueError("sample_every must be at least 1")
    n_steps = max(1, round(T / dt))
    y = np.array(y0, dtype=float)
    series = [(0.0, OdePoint(*y))]
    for k in range(1, n_steps + 1):
        y = _rk4_ode(params, y, dt)
        t = k * dt
        if k % sample_every == 0 or k == n_steps:
            if not np.isfinite(y).all():
                raise RuntimeError(f"non-finite value at t = {t:g}")
            series.append((t, OdePoint(*y)))
    return series
