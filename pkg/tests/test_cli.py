import csv
import json
import math

import pytest

from qwsim.cli import (ANALYZE_COLUMNS, EVOLVE_COLUMNS, SWEEP_COLUMNS, main)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


REDUCED_SWEEP = ("--set", "grid_points=5")


class TestEvolve:
    def test_fig2a_to_stdout(self, capsys):
        code, out, err = run(capsys, "evolve", "--preset", "fig2a")
        assert code == 0 and err == ""
        lines = out.splitlines()
        assert lines[0] == ",".join(EVOLVE_COLUMNS)
        assert len(lines) == 1 + 2000
        last = [float(v) for v in lines[-1].split(",")]
        row = dict(zip(EVOLVE_COLUMNS, last))
        assert row["t"] == 100.0
        assert row["rho22"] > 0.9
        assert row["trace"] == pytest.approx(1.0, abs=1e-9)

    def test_out_file_and_meta_sidecar(self, tmp_path, capsys):
        out = tmp_path / "evolve.csv"
        code, stdout, _ = run(capsys, "evolve", "--preset", "fig2a",
                              "--out", str(out))
        assert code == 0 and stdout == ""
        rows = read_csv(out)
        assert len(rows) == 2000
        meta = json.loads((tmp_path / "evolve.csv.meta.json").read_text())
        assert meta["config"]["k"] == -0.70
        assert meta["integrator_stats"]["max_trace_drift"] < 1e-9
        assert meta["integrator_stats"]["steps"] > 0

    def test_no_pulses_gives_constant_rows(self, capsys):
        code, out, _ = run(capsys, "evolve", "--set", "omega_p0=0",
                           "--set", "omega_s0=0")
        assert code == 0
        body = out.splitlines()[1:]
        first_pops = body[0].split(",")[1:]
        assert all(line.split(",")[1:] == first_pops for line in body)

    def test_byte_identical_reruns(self, tmp_path, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run(capsys, "evolve", "--preset", "fig3a", "--out", str(a))
        run(capsys, "evolve", "--preset", "fig3a", "--out", str(b))
        assert a.read_bytes() == b.read_bytes()
        assert (tmp_path / "a.csv.meta.json").read_bytes() == \
            (tmp_path / "b.csv.meta.json").read_bytes()


class TestSweep:
    def test_reduced_epsilon_sweep(self, tmp_path, capsys):
        out = tmp_path / "sweep.csv"
        code, _, err = run(capsys, "sweep", "--preset", "fig5",
                           *REDUCED_SWEEP, "--out", str(out))
        assert code == 0 and err == ""
        rows = read_csv(out)
        assert list(rows[0]) == SWEEP_COLUMNS
        assert len(rows) == 5
        assert float(rows[0]["sweep_value"]) == 0.0
        assert float(rows[-1]["sweep_value"]) == 1.0
        assert float(rows[-1]["rho22"]) > float(rows[0]["rho22"])

    def test_threads_flag_does_not_change_output(self, tmp_path, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run(capsys, "sweep", "--preset", "fig5", *REDUCED_SWEEP,
            "--out", str(a), "--threads", "1")
        run(capsys, "sweep", "--preset", "fig5", *REDUCED_SWEEP,
            "--out", str(b), "--threads", "2")
        assert a.read_bytes() == b.read_bytes()

    def test_threads_env_fallback(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("QWSIM_THREADS", "2")
        out = tmp_path / "c.csv"
        code, _, _ = run(capsys, "sweep", "--preset", "fig5",
                         *REDUCED_SWEEP, "--out", str(out))
        assert code == 0
        meta = json.loads((tmp_path / "c.csv.meta.json").read_text())
        assert meta["config"]["threads"] == 2

    def test_bad_threads_env_is_config_error(self, capsys, monkeypatch):
        monkeypatch.setenv("QWSIM_THREADS", "many")
        code, _, err = run(capsys, "sweep", "--preset", "fig5")
        assert code == 1
        assert "qwsim-error" in err


class TestAnalyze:
    def test_fig2a_geometry(self, capsys):
        code, out, _ = run(capsys, "analyze", "--preset", "fig2a")
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == ",".join(ANALYZE_COLUMNS)
        row = dict(zip(ANALYZE_COLUMNS, map(float, lines[1].split(","))))
        # symmetric pulse pair: equal fields at the overlap midpoint
        assert row["theta"] == pytest.approx(math.pi / 4, abs=1e-12)
        assert row["gamma_f"] == pytest.approx(1.45505616, abs=1e-7)
        assert row["asymptotic_c1_sq"] + row["asymptotic_c2_sq"] == \
            pytest.approx(1.0, abs=1e-12)

    def test_zero_splitting_gives_zero_phase(self, capsys):
        code, out, _ = run(capsys, "analyze", "--set", "omega43=0",
                           "--set", "delta_p=0", "--set", "delta_s=0")
        assert code == 0
        row = dict(zip(ANALYZE_COLUMNS,
                       map(float, out.splitlines()[1].split(","))))
        assert row["gamma_f"] == 0.0 and row["phi"] == 0.0
        assert row["asymptotic_c2_sq"] == 1.0


class TestCheck:
    def test_check_passes(self, capsys):
        code, out, err = run(capsys, "check")
        assert code == 0 and err == ""
        lines = out.splitlines()
        assert lines and all("PASS" in line for line in lines)


class TestFailureModes:
    def test_unknown_key_exits_1(self, capsys):
        code, _, err = run(capsys, "evolve", "--set", "voltage=3")
        assert code == 1
        payload = json.loads(err.split("qwsim-error: ", 1)[1])
        assert payload["code"] == 1

    def test_malformed_set_exits_1(self, capsys):
        code, _, err = run(capsys, "evolve", "--set", "k0.7")
        assert code == 1 and "key=value" in err

    def test_missing_config_file_exits_1(self, capsys):
        code, _, err = run(capsys, "evolve", "--config", "/no/such/file.cfg")
        assert code == 1 and "qwsim-error" in err

    def test_nonfinite_dynamics_exit_2(self, capsys):
        code, _, err = run(capsys, "evolve", "--set", "delta_p=1e308")
        assert code == 2
        payload = json.loads(err.split("qwsim-error: ", 1)[1])
        assert payload["kind"] == "StepUnderflow"

    def test_unstable_fixed_step_exits_3(self, capsys):
        code, _, err = run(capsys, "evolve", "--set", "method=rk4",
                           "--set", "step=10", "--set", "samples=2")
        assert code == 3
        payload = json.loads(err.split("qwsim-error: ", 1)[1])
        assert payload["kind"] == "InvariantBreach"

    def test_sweep_failure_maps_cause_to_exit_code(self, capsys):
        # grid reaches detunings whose dynamics overflow -> integration error
        code, _, err = run(capsys, "sweep", "--set", "variable=detuning",
                           "--set", "grid_start=0", "--set",
                           "grid_stop=1e308", "--set", "grid_points=3",
                           "--set", "samples=2", "--set", "t_end=10")
        assert code == 2
        payload = json.loads(err.split("qwsim-error: ", 1)[1])
        assert payload["kind"] == "SweepAborted"

    def test_config_file_round_trip(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("preset = fig2a\n# comment\nsamples = 50\n")
        out = tmp_path / "r.csv"
        code, _, _ = run(capsys, "evolve", "--config", str(cfg),
                         "--out", str(out))
        assert code == 0
        assert len(read_csv(out)) == 50
