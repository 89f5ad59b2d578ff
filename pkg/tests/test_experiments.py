"""Experiment drivers: initial data, sync runs, bisection, studies."""

import math

import numpy as np
import pytest

from hrsync.experiments import (ExperimentReport, InitialSpec, RunConfig,
                                bisect_empirical_threshold,
                                convergence_study,
                                generate_initial_condition,
                                oracle_comparison, run_simulation,
                                run_sync_experiment)
from hrsync.grid import make_grid
from hrsync.integrator import StepperConfig
from hrsync.params import preset_parameters

GRID = make_grid(1, 41, 1.0)


def small_config(p=0.0, T=2.0, scheme="imex-euler", dt=2e-3, **kw):
    defaults = dict(
        params=preset_parameters("test", p=p),
        grid=GRID,
        stepper=StepperConfig(dt=dt, scheme=scheme),
        T=T,
        sample_every=50,
        initial=InitialSpec(generator="fourier-smooth", seed=1,
                            amplitude=0.5),
    )
    defaults.update(kw)
    return RunConfig(**defaults)


class TestInitialSpec:
    def test_unknown_generator(self):
        with pytest.raises(ValueError, match="unknown generator"):
            InitialSpec(generator="fourier")

    def test_values_length(self):
        with pytest.raises(ValueError, match="six"):
            InitialSpec(generator="constant", values=(1.0, 2.0))


class TestRunConfigValidation:
    def test_accepts_defaults(self):
        config = small_config()
        assert config.epsilon == 1e-6 and config.p_hi == 6.0

    @pytest.mark.parametrize("kw,msg", [
        (dict(T=0.0), "T must be positive"),
        (dict(sample_every=0), "sample_every"),
        (dict(p_lo=3.0, p_hi=3.0), "p_lo < p_hi"),
        (dict(p_lo=-1.0), "p_lo must be nonnegative"),
        (dict(tol=0.0), "tol"),
        (dict(epsilon=0.0), "epsilon"),
        (dict(epsilon=1.5), "epsilon"),
    ])
    def test_rejects_bad_values(self, kw, msg):
        with pytest.raises(ValueError, match=msg):
            small_config(**kw)

    def test_dimension_agreement(self):
        with pytest.raises(ValueError, match="dimensions differ"):
            small_config(grid=make_grid(2, 11, 1.0))

    def test_length_agreement(self):
        with pytest.raises(ValueError, match="domain lengths differ"):
            small_config(grid=make_grid(1, 41, 2.0))


class TestInitialConditions:
    def test_constant_fills_values(self):
        values = (0.1, -0.2, 0.3, 0.4, -0.5, 0.6)
        state = generate_initial_condition(
            InitialSpec(generator="constant", values=values), GRID)
        for i, val in enumerate(values):
            assert np.array_equal(state.data[i], np.full(GRID.shape, val))

    def test_fourier_reproducible_bitwise(self):
        spec = InitialSpec(generator="fourier-smooth", seed=42, amplitude=0.7)
        s1 = generate_initial_condition(spec, GRID)
        s2 = generate_initial_condition(spec, GRID)
        assert np.array_equal(s1.data, s2.data)

    def test_fourier_seeds_differ(self):
        s1 = generate_initial_condition(InitialSpec(seed=0), GRID)
        s2 = generate_initial_condition(InitialSpec(seed=1), GRID)
        assert not np.array_equal(s1.data, s2.data)

    def test_fourier_amplitude_scales_linearly(self):
        s1 = generate_initial_condition(InitialSpec(seed=3, amplitude=1.0),
                                        GRID)
        s2 = generate_initial_condition(InitialSpec(seed=3, amplitude=2.0),
                                        GRID)
        assert np.allclose(s2.data, 2.0 * s1.data, rtol=1e-13)

    def test_fourier_zero_normal_derivative_structure(self):
        # cosine series: symmetric second difference at both walls
        state = generate_initial_condition(InitialSpec(seed=5), GRID)
        u = state.u1
        # one-sided slope is O(h) small relative to interior variation
        h = GRID.h
        edge_slope = abs(u[1] - u[0]) / h
        interior_slope = np.max(np.abs(np.diff(u))) / h
        assert edge_slope <= 0.35 * interior_slope

    def test_fourier_2d_shape(self):
        grid2 = make_grid(2, 17, 1.0)
        state = generate_initial_condition(InitialSpec(seed=1), grid2)
        assert state.data.shape == (6, 17, 17)
        assert state.is_finite()

    def test_bump_placement(self):
        state = generate_initial_condition(
            InitialSpec(generator="bump", amplitude=2.0), GRID)
        x = GRID.axis_coordinates
        assert x[np.argmax(state.u1)] == pytest.approx(0.4, abs=GRID.h)
        assert x[np.argmax(state.u2)] == pytest.approx(0.6, abs=GRID.h)
        assert np.max(state.u1) == pytest.approx(2.0, rel=1e-3)
        assert np.array_equal(state.v1, np.zeros(GRID.shape))
        assert np.array_equal(state.w2, np.zeros(GRID.shape))


class TestRunSimulation:
    def test_scalars_and_bound(self):
        report = run_simulation(small_config(T=1.0))
        assert report.name == "simulate"
        assert set(report.scalars) >= {"norm_g_sq_initial",
                                       "norm_g_sq_final", "norm_g_sq_max",
                                       "h1_u_max"}
        assert report.passed["global_bound"]
        assert report.records[0].t == 0.0
        assert report.scalars["norm_g_sq_max"] >= \
            report.scalars["norm_g_sq_final"]

    def test_deterministic_repeat(self):
        config = small_config(T=0.5)
        rep_a = run_simulation(config)
        rep_b = run_simulation(config)
        assert rep_a.records == rep_b.records
        assert rep_a.scalars == rep_b.scalars


class TestRunSyncExperiment:
    def test_above_threshold_checks_bound(self):
        report = run_sync_experiment(small_config(p=6.0, T=5.0))
        assert report.name == "sync"
        assert report.scalars["p_star"] == 5.0
        assert report.scalars["delta"] == 32.0
        assert report.scalars["mu_analytic"] == 1.0
        assert report.passed["gronwall_bound"]
        assert report.passed["decay_rate_dominates"]
        assert report.scalars["mu_emp"] >= 0.95
        assert report.scalars["fit_residual"] < 1.0
        assert report.all_passed

    def test_below_threshold_is_informational(self):
        report = run_sync_experiment(small_config(p=0.0, T=1.0))
        assert "gronwall_bound" not in report.passed
        assert "mu_emp" not in report.scalars
        assert any("below the analytic threshold" in note
                   for note in report.notes)
        assert "sync_dist_sq_tail_max" in report.scalars

    def test_decay_is_genuinely_exponential(self):
        report = run_sync_experiment(small_config(p=6.0, T=5.0))
        first, last = report.records[0], report.records[-1]
        assert last.sync_dist_sq < 1e-3 * first.sync_dist_sq


def stub(rule):
    """Criterion stub: boolean rule(p), ratio 1 when failing else 0."""

    def criterion(p):
        holds = rule(p)
        return holds, 0.0 if holds else 1.0

    return criterion


class TestBisection:
    def test_standard_bracket_converges(self):
        config = small_config()
        p_emp, report = bisect_empirical_threshold(
            config, criterion=stub(lambda p: p >= 2.5))
        assert abs(p_emp - 2.5) <= config.tol
        assert report.passed["empirical_leq_analytic"]
        assert report.passed["certified"]
        assert report.passed["monotone_trace"]
        assert report.scalars["p_star"] == 5.0
        assert report.scalars["n_evaluations"] == len(report.series["trace_p"])
        assert not any("degenerate" in n for n in report.notes)

    def test_tol_controls_resolution(self):
        p_fine, _ = bisect_empirical_threshold(
            small_config(), tol=1e-3, criterion=stub(lambda p: p >= 2.5))
        assert abs(p_fine - 2.5) <= 1e-3

    def test_degenerate_bracket_returns_lower_endpoint(self):
        p_emp, report = bisect_empirical_threshold(
            small_config(), criterion=stub(lambda p: True))
        assert p_emp == 0.0
        assert any("degenerate" in note for note in report.notes)
        assert report.passed["certified"]
        # endpoints plus the analytic-threshold certification
        assert report.scalars["n_evaluations"] == 3.0

    def test_unreachable_criterion_raises(self):
        with pytest.raises(ValueError, match="criterion not bracketed"):
            bisect_empirical_threshold(small_config(),
                                       criterion=stub(lambda p: False))

    def test_non_monotone_criterion_flagged(self):
        # holds only at small p: degenerate result, and the trace shows
        # the criterion failing again at larger coupling
        p_emp, report = bisect_empirical_threshold(
            small_config(), criterion=stub(lambda p: p < 1.0))
        assert p_emp == 0.0
        assert not report.passed["monotone_trace"]
        assert not report.passed["certified"]
        assert any("non-monotone" in note for note in report.notes)

    def test_wide_tol_returns_midpoint(self):
        p_emp, report = bisect_empirical_threshold(
            small_config(), p_lo=2.0, p_hi=3.0, tol=5.0,
            criterion=stub(lambda p: p >= 2.5))
        assert p_emp == 2.5
        assert any("low-resolution" in note for note in report.notes)

    def test_malformed_bracket(self):
        with pytest.raises(ValueError, match="malformed bracket"):
            bisect_empirical_threshold(small_config(), p_lo=3.0, p_hi=1.0)

    def test_real_criterion_self_synchronizes(self):
        # the "test" parameter set relaxes to synchrony even uncoupled,
        # so with a lenient epsilon the bracket is degenerate
        config = small_config(T=2.0, epsilon=0.5)
        p_emp, report = bisect_empirical_threshold(config)
        assert p_emp == 0.0
        assert report.passed["empirical_leq_analytic"]
        assert any("degenerate" in note for note in report.notes)

    def test_real_criterion_unreachable_epsilon(self):
        config = small_config(T=0.5, epsilon=1e-12)
        with pytest.raises(ValueError, match="criterion not bracketed"):
            bisect_empirical_threshold(config)


class TestConvergenceStudy:
    def test_orders_recovered(self):
        report = convergence_study(small_config(T=0.5))
        assert report.passed["spatial_order_ok"]
        assert report.passed["temporal_order_imex_euler_ok"]
        assert report.passed["temporal_order_imex_strang_ok"]
        assert report.scalars["spatial_order"] == pytest.approx(2.0, abs=0.2)
        assert report.scalars["temporal_order_imex_euler"] == pytest.approx(
            1.0, abs=0.2)
        assert report.scalars["temporal_order_imex_strang"] == pytest.approx(
            2.0, abs=0.2)
        assert len(report.series["spatial_h"]) == 3
        assert len(report.series["temporal_error_imex_euler"]) == 2

    def test_spatial_errors_decrease(self):
        report = convergence_study(small_config(T=0.5))
        errors = report.series["spatial_error"]
        assert errors[0] > errors[1] > errors[2]


class TestOracleComparison:
    def test_requires_constant_generator(self):
        with pytest.raises(ValueError, match="constant"):
            oracle_comparison(small_config())

    def test_constant_data_tracks_ode(self):
        config = small_config(
            T=2.0, dt=1e-3, scheme="imex-strang",
            initial=InitialSpec(generator="constant",
                                values=(0.1, 0.2, -0.1, 0.3, 0.0, 0.05)),
            sample_every=100)
        report = oracle_comparison(config)
        assert report.passed["oracle_match"]
        assert report.scalars["sup_error"] < 1e-6
        assert len(report.series["t"]) == len(report.series["sup_error"])
        assert report.scalars["n_samples"] == len(report.series["t"])


class TestExperimentReport:
    def test_all_passed_aggregates(self):
        report = ExperimentReport(name="x", config=small_config())
        assert report.all_passed  # vacuous
        report.passed["a"] = True
        report.passed["b"] = False
        assert not report.all_passed
