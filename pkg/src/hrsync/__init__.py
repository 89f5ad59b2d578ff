"""Simulator and verification harness for two diffusively coupled neurons.

The model couples a pair of three-variable bursting neurons (membrane
potential, spiking variable, bursting variable) through their membrane
potentials; the potentials also diffuse over a shared 1D or 2D domain
with zero-flux boundaries.  The package integrates the system with IMEX
schemes and checks the closed-form estimates that govern it — the
global norm bound, the absorbing ball, and the exponential
synchronization bound above the analytic coupling threshold — along
every computed trajectory.

Typical library use::

    from hrsync import (preset_parameters, make_grid, StepperConfig,
                        InitialSpec, RunConfig, run_sync_experiment)

    params = preset_parameters("test", p=6.0)
    config = RunConfig(params=params, grid=make_grid(1, 101, 1.0),
                       stepper=StepperConfig(dt=1e-3, scheme="imex-strang"),
                       T=20.0, initial=InitialSpec("fourier-smooth", seed=1,
                                                   amplitude=0.5))
    report = run_sync_experiment(config)
    assert report.all_passed

The ``hrsync`` command exposes the same drivers on config files.
"""

from .diagnostics import (BoundReport, TimeSeriesRecord,
                          check_absorbing_entry, check_global_bound,
                          check_gronwall_sync, check_time_avg_energy,
                          fit_decay_rate, record_diagnostics)
from .dynamics import (DifferenceState, PairState, coupling_rhs,
                       difference_residual, full_rhs, reaction_rhs)
from .experiments import (ExperimentReport, InitialSpec, RunConfig,
                          bisect_empirical_threshold, convergence_study,
                          generate_initial_condition, oracle_comparison,
                          run_simulation, run_sync_experiment)
from .grid import (Grid, h1_seminorm_sq, helmholtz_solve, l2_inner,
                   l2_norm_sq, laplacian_apply, make_grid)
from .integrator import (ImexStepper, OdePoint, StepperConfig, imex_step,
                         integrate, integrate_ode, rk4_ode_step)
from .config import ConfigError, parse_run_config, render_run_config
from .params import (DerivedConstants, Parameters, compute_absorb_entry_time,
                     compute_absorbing_constants, compute_delta_mu,
                     compute_lambda, compute_sync_threshold,
                     compute_time_avg_bounds, preset_parameters,
                     validate_parameters)
from .reporting import write_report, write_timeseries

__version__ = "0.1.0"
