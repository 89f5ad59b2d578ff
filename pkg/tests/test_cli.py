"""End-to-end command-line behavior: files, exit codes, messages."""

import pytest

from hrsync.cli import main
from hrsync.reporting import TIMESERIES_HEADER

SYNC_CFG = """
[parameters]
preset = test
p = 6.0

[grid]
points = 41

[stepper]
dt = 2e-3

[initial]
seed = 1
amplitude = 0.5

[experiment]
name = sync
T = 1.5
sample_every = 50
"""

SIM_CFG = """
[parameters]
preset = test

[grid]
points = 21

[stepper]
dt = 2e-3

[initial]
seed = 1
amplitude = 0.5

[experiment]
name = simulate
T = 0.5
sample_every = 25
"""


def write_cfg(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return path


class TestArgumentHandling:
    def test_no_arguments_is_usage_error(self, capsys):
        assert main([]) == 2
        assert "usage" in capsys.readouterr().err

    def test_unknown_command(self, capsys):
        assert main(["evolve", "x.cfg"]) == 2

    def test_help_exits_zero(self, capsys):
        assert main(["--help"]) == 0
        assert "simulate" in capsys.readouterr().out

    def test_missing_config_file(self, tmp_path, capsys):
        assert main(["simulate", str(tmp_path / "nope.cfg")]) == 2
        assert "config error" in capsys.readouterr().err

    def test_malformed_config(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, "[parameters]\nalpa = 1\n")
        assert main(["simulate", str(cfg)]) == 2
        err = capsys.readouterr().err
        assert "config error" in err and "line 2" in err


class TestConstantsCommand:
    def test_prints_table(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, "[parameters]\npreset = test\np = 6.0\n")
        assert main(["constants", str(cfg)]) == 0
        out = capsys.readouterr().out
        assert "C1" in out and "p_star" in out
        assert "p_star  = 5" in out
        assert "delta   = 32" in out
        assert "mu      = 1" in out
        assert "M1" in out and "M2" in out

    def test_subthreshold_notes_missing_delta(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, "[parameters]\npreset = test\n")
        assert main(["constants", str(cfg)]) == 0
        out = capsys.readouterr().out
        assert "delta, mu undefined" in out


class TestSyncCommand:
    def test_full_run_writes_outputs(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, SYNC_CFG)
        out_dir = tmp_path / "out"
        assert main(["sync", str(cfg), "--out", str(out_dir)]) == 0

        csv = (out_dir / "timeseries.csv").read_text().splitlines()
        assert csv[0] == TIMESERIES_HEADER
        assert len(csv) >= 3
        assert (out_dir / "sync_decay.png").stat().st_size > 1000

        report = (out_dir / "report.txt").read_text()
        assert "p_star=5" in report
        assert "gronwall_bound=pass" in report
        assert "mu_emp=" in report

        stdout = capsys.readouterr().out
        assert "gronwall_bound: pass" in stdout
        assert "wrote" in stdout

    def test_quiet_suppresses_stdout(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, SYNC_CFG)
        out_dir = tmp_path / "out"
        assert main(["sync", str(cfg), "--out", str(out_dir),
                     "--quiet"]) == 0
        assert capsys.readouterr().out == ""


class TestSimulateCommand:
    def test_writes_csv_and_figure(self, tmp_path):
        cfg = write_cfg(tmp_path, SIM_CFG)
        out_dir = tmp_path / "out"
        assert main(["simulate", str(cfg), "--out", str(out_dir),
                     "--quiet"]) == 0
        assert (out_dir / "timeseries.csv").exists()
        assert (out_dir / "timeseries.png").stat().st_size > 1000
        assert "global_bound=pass" in (out_dir / "report.txt").read_text()

    def test_seed_override_changes_run(self, tmp_path):
        cfg = write_cfg(tmp_path, SIM_CFG)
        outs = {}
        for seed in (1, 1, 2):
            out_dir = tmp_path / f"out{len(outs)}"
            assert main(["simulate", str(cfg), "--out", str(out_dir),
                         "--quiet", "--seed", str(seed)]) == 0
            outs[len(outs)] = (out_dir / "timeseries.csv").read_text()
        assert outs[0] == outs[1]   # same seed: byte-identical
        assert outs[0] != outs[2]   # different seed: different data


class TestThresholdCommand:
    def test_degenerate_bracket_reported(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, """
[parameters]
preset = test

[grid]
points = 21

[stepper]
dt = 2e-3

[initial]
seed = 1
amplitude = 0.5

[experiment]
name = threshold
T = 1.5
epsilon = 0.5
""")
        out_dir = tmp_path / "out"
        assert main(["threshold", str(cfg), "--out", str(out_dir)]) == 0
        report = (out_dir / "report.txt").read_text()
        assert "p_emp=0" in report
        assert "degenerate" in report
        assert (out_dir / "threshold_trace.png").exists()

    def test_unreachable_criterion_is_run_failure(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, """
[parameters]
preset = test

[grid]
points = 21

[stepper]
dt = 2e-3

[experiment]
name = threshold
T = 0.3
epsilon = 1e-9
""")
        assert main(["threshold", str(cfg), "--out",
                     str(tmp_path / "out")]) == 1
        assert "run failed" in capsys.readouterr().err


class TestConvergeCommand:
    def test_orders_measured(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, """
[parameters]
preset = test

[grid]
points = 41

[stepper]
dt = 2e-3

[initial]
seed = 1
amplitude = 0.5

[experiment]
name = converge
T = 0.5
""")
        out_dir = tmp_path / "out"
        assert main(["converge", str(cfg), "--out", str(out_dir)]) == 0
        report = (out_dir / "report.txt").read_text()
        assert "spatial_order_ok=pass" in report
        assert "temporal_order_imex_strang_ok=pass" in report
        assert (out_dir / "convergence.png").exists()


class TestOracleCommand:
    def test_requires_constant_generator(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, """
[experiment]
name = oracle
T = 1
""")
        assert main(["oracle", str(cfg), "--out",
                     str(tmp_path / "out")]) == 2
        assert "config error" in capsys.readouterr().err

    def test_failing_check_exits_one(self, tmp_path, capsys):
        # first-order stepping cannot hold the default oracle tolerance
        cfg = write_cfg(tmp_path, """
[parameters]
preset = test

[grid]
points = 21

[stepper]
dt = 1e-3
scheme = imex-euler

[initial]
generator = constant
values = 0.1, 0.2, -0.1, 0.3, 0.0, 0.05

[experiment]
name = oracle
T = 5
sample_every = 100
""")
        out_dir = tmp_path / "out"
        assert main(["oracle", str(cfg), "--out", str(out_dir)]) == 1
        captured = capsys.readouterr()
        assert "one or more checks failed" in captured.err
        report = (out_dir / "report.txt").read_text()
        assert "oracle_match=fail" in report
        assert (out_dir / "oracle_error.png").exists()

    def test_accurate_scheme_passes(self, tmp_path):
        cfg = write_cfg(tmp_path, """
[parameters]
preset = test

[grid]
points = 21

[stepper]
dt = 1e-3
scheme = imex-strang

[initial]
generator = constant
values = 0.1, 0.2, -0.1, 0.3, 0.0, 0.05

[experiment]
name = oracle
T = 2
sample_every = 100
""")
        out_dir = tmp_path / "out"
        assert main(["oracle", str(cfg), "--out", str(out_dir),
                     "--quiet"]) == 0
        assert "oracle_match=pass" in (out_dir / "report.txt").read_text()
