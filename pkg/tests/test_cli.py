import json
import math

import pytest

from flapkit import cli, dynamics
from flapkit.config import load_config, reference_config_path


@pytest.fixture(scope="module")
def fixed_kt_config(tmp_path_factory, calibrated_k_t):
    """Reference config with the session-calibrated torque constant frozen
    in, so CLI invocations skip calibration."""
    raw = json.loads(reference_config_path().read_text())
    raw["torque_constant"] = {"mode": "fixed", "value": f"{calibrated_k_t.k_t:.9e}Nm/A"}
    path = tmp_path_factory.mktemp("cli") / "fixed.json"
    path.write_text(json.dumps(raw, indent=1))
    return path


def run(args):
    return cli.main([str(a) for a in args])


class TestDesignSpring:
    def test_target_freq_prints_sizing(self, tmp_path, capsys):
        code = run(["design-spring", "--target-freq", "130Hz", "--out", tmp_path])
        assert code == 0
        out = capsys.readouterr().out
        assert "0.34 uNm" in out
        data = json.loads((tmp_path / "spring_design.json").read_text())
        assert abs(data["relative_error"]) <= 0.02

    def test_target_stiffness(self, tmp_path, capsys):
        code = run(["design-spring", "--target-stiffness", "0.8uNm", "--out", tmp_path])
        assert code == 0
        data = json.loads((tmp_path / "spring_design.json").read_text())
        assert data["achieved_stiffness_Nm_per_rad"] == pytest.approx(0.8e-6, rel=0.02)
        assert data["config_hash"]

    def test_malformed_unit_is_config_error(self, tmp_path):
        assert run(["design-spring", "--target-freq", "130 Hzz", "--out", tmp_path]) == 1

    def test_exactly_one_target_required(self, tmp_path):
        assert run(["design-spring", "--out", tmp_path]) == 1
        assert run(["design-spring", "--target-freq", "130Hz",
                    "--target-stiffness", "1uNm", "--out", tmp_path]) == 1

    def test_infeasible_target_exits_2(self, tmp_path, capsys):
        code = run(["design-spring", "--target-stiffness", "340uNm", "--out", tmp_path])
        assert code == 2
        assert "nearest achievable" in capsys.readouterr().err


class TestSimulate:
    def test_artifacts_and_determinism(self, fixed_kt_config, tmp_path, capsys):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert run(["simulate", "--config", fixed_kt_config, "--cycles", 40, "--out", out1]) == 0
        assert run(["simulate", "--config", fixed_kt_config, "--cycles", 40, "--out", out2]) == 0
        for name in ("timeseries.csv", "summary.json", "fig_timeseries.png"):
            assert (out1 / name).exists()
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
        lines = (out1 / "timeseries.csv").read_text().splitlines()
        assert lines[0].startswith("# config_hash=")
        assert lines[1] == "t,stroke_angle,stroke_rate,pitch_angle,pitch_rate,lift,drag,tau_drive,P_elec,P_aero"
        assert len(lines) == 2 + 40 * 1000 + 1
        summary = json.loads((out1 / "summary.json").read_text())
        for key in ("stroke_amplitude_deg", "pitch_max_deg", "pitch_min_deg",
                    "detuning", "mean_electrical_power_W", "energy_audit", "config_hash"):
            assert key in summary

    def test_zero_cycles_is_usage_error(self, fixed_kt_config, tmp_path):
        assert run(["simulate", "--config", fixed_kt_config, "--cycles", 0, "--out", tmp_path]) == 1

    def test_divergence_exits_3_with_state_dump(self, tmp_path, capsys):
        raw = json.loads(reference_config_path().read_text())
        raw["torque_constant"] = {"mode": "fixed", "value": "1e-2Nm/A"}
        cfg = tmp_path / "diverge.json"
        cfg.write_text(json.dumps(raw))
        code = run(["simulate", "--config", cfg, "--cycles", 10, "--out", tmp_path])
        assert code == 3
        assert "last valid state" in capsys.readouterr().err
        assert (tmp_path / "diverged_state.json").exists()

    def test_missing_config_file(self, tmp_path):
        assert run(["simulate", "--config", tmp_path / "nope.json", "--cycles", 5,
                    "--out", tmp_path]) == 1


class TestSweep:
    def test_sweep_artifacts(self, fixed_kt_config, tmp_path):
        out = tmp_path / "sw"
        assert run(["sweep", "--config", fixed_kt_config, "--from", "125Hz", "--to", "140Hz",
                    "--points", 3, "--out", out]) == 0
        lines = (out / "sweep.csv").read_text().splitlines()
        assert lines[0].startswith("# config_hash=")
        assert lines[1].split(",")[0] == "frequency_hz"
        assert len(lines) == 2 + 3
        dat = (out / "sweep_plot.dat").read_text().splitlines()
        assert len([l for l in dat if not l.startswith("#")]) == 3
        assert (out / "fig_sweep.png").stat().st_size > 0

    def test_parallel_matches_serial(self, fixed_kt_config, tmp_path):
        ser, par = tmp_path / "ser", tmp_path / "par"
        run(["sweep", "--config", fixed_kt_config, "--from", "128Hz", "--to", "136Hz",
             "--points", 3, "--out", ser])
        run(["sweep", "--config", fixed_kt_config, "--from", "128Hz", "--to", "136Hz",
             "--points", 3, "--parallel", 3, "--out", par])
        assert (ser / "sweep.csv").read_bytes() == (par / "sweep.csv").read_bytes()

    def test_single_point_matches_simulate(self, fixed_kt_config):
        project = load_config(fixed_kt_config)
        cfg = project.sim_config(project.resolve_torque_constant())
        points = dynamics.frequency_sweep(cfg, 132.3, 140.0, 2)
        amp, settled, _ = dynamics.steady_state_amplitude(cfg.with_drive_frequency(132.3))
        assert settled
        assert points[0]["amplitude_rad"] == pytest.approx(amp, rel=0.005)

    def test_bad_range(self, fixed_kt_config, tmp_path):
        assert run(["sweep", "--config", fixed_kt_config, "--from", "140Hz", "--to", "120Hz",
                    "--points", 3, "--out", tmp_path]) == 1


class TestReport:
    def test_full_report(self, fixed_kt_config, tmp_path):
        sim_out = tmp_path / "sim"
        run(["simulate", "--config", fixed_kt_config, "--cycles", 60, "--out", sim_out])
        out = tmp_path / "rep"
        assert run(["report", "--config", fixed_kt_config,
                    "--sim-summary", sim_out / "summary.json", "--out", out]) == 0
        report = json.loads((out / "report.json").read_text())
        assert "simulation" in report
        assert (out / "report.txt").exists()
        assert (out / "fig_mass_budget.png").stat().st_size > 0

    def test_missing_summary_warns_and_degrades(self, fixed_kt_config, tmp_path, capsys):
        out = tmp_path / "rep2"
        code = run(["report", "--config", fixed_kt_config,
                    "--sim-summary", tmp_path / "missing.json", "--out", out])
        assert code == 0
        assert "budget-only" in capsys.readouterr().err
        report = json.loads((out / "report.json").read_text())
        assert "simulation" not in report

    def test_format_json_only(self, fixed_kt_config, tmp_path):
        out = tmp_path / "rep3"
        assert run(["report", "--config", fixed_kt_config, "--format", "json",
                    "--out", out]) == 0
        assert (out / "report.json").exists()
        assert not (out / "report.txt").exists()

    def test_report_determinism(self, fixed_kt_config, tmp_path):
        out1, out2 = tmp_path / "r1", tmp_path / "r2"
        run(["report", "--config", fixed_kt_config, "--format", "json", "--out", out1])
        run(["report", "--config", fixed_kt_config, "--format", "json", "--out", out2])
        assert (out1 / "report.json").read_bytes() == (out2 / "report.json").read_bytes()
