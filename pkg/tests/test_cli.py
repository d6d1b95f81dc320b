import json
import math
import subprocess
import sys

import numpy as np
import pytest

from photocount import io

RUN = [sys.executable, "-m", "photocount"]


def run_cli(*args, expect=0):
    result = subprocess.run(
        [*RUN, *map(str, args)], capture_output=True, text=True
    )
    assert result.returncode == expect, result.stderr or result.stdout
    return result


class TestSimulate:
    def test_vacuum_batch(self, tmp_path):
        out = tmp_path / "vac.csv"
        run_cli("simulate", "--state", "vacuum", "--n", "20000", "--seed", "7", "--out", out)
        batch, meta = io.read_quadrature_batch(out)
        assert batch.count == 20000
        assert abs(np.var(batch.samples) - 0.5) < 0.02
        assert meta["state"] == {"kind": "vacuum"}
        assert (tmp_path / "vac.config.json").exists()

    def test_squeezed_batch_second_moment(self, tmp_path):
        out = tmp_path / "sq.csv"
        run_cli(
            "simulate", "--state", "squeezed", "--r", "0.5",
            "--n", "2e5", "--seed", "8", "--out", out,
        )
        batch, _ = io.read_quadrature_batch(out)
        # 5 s.e. of the second moment at this size is 0.013
        assert abs(np.mean(batch.samples**2) - math.cosh(1.0) / 2) < 0.013

    def test_identical_commands_are_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ("simulate", "--state", "thermal", "--nbar", "1", "--n", "5000", "--seed", "3")
        run_cli(*args, "--out", a)
        run_cli(*args, "--out", b)
        assert a.read_bytes() == b.read_bytes()

    def test_trace_output(self, tmp_path):
        out = tmp_path / "pulse.csv"
        run_cli(
            "simulate", "--kind", "trace", "--carrier", "5e9", "--sigma-t", "10e-9",
            "--amplitude", "1e-6", "--fs", "25e9", "--duration", "200e-9",
            "--seed", "2", "--out", out,
        )
        trace, meta = io.read_timetrace(out)
        assert meta["fs"] == 25e9
        assert np.abs(trace.samples).max() == pytest.approx(1e-6, rel=1e-3)

    def test_missing_state_is_config_error(self, tmp_path):
        run_cli("simulate", "--n", "100", "--out", tmp_path / "x.csv", expect=2)

    def test_undersampled_trace_is_config_error(self, tmp_path):
        run_cli(
            "simulate", "--kind", "trace", "--carrier", "5e9", "--sigma-t", "10e-9",
            "--amplitude", "1e-6", "--fs", "10e9", "--duration", "200e-9",
            "--out", tmp_path / "x.csv", expect=2,
        )


class TestAnalyze:
    def test_coherent_batch_report(self, tmp_path):
        batch_path = tmp_path / "coh.csv"
        report_path = tmp_path / "report.json"
        run_cli(
            "simulate", "--state", "coherent", "--nbar", "0.5",
            "--n", "2e5", "--seed", "11", "--out", batch_path,
        )
        run_cli(
            "analyze", "--input", batch_path, "--bootstrap", "120",
            "--seed", "1", "--out", report_path,
        )
        report = json.loads(report_path.read_text())
        for field in ("n_mean", "n_var", "n_skew3"):
            assert abs(report[field] - 0.5) < 5 * report["errors"][field]
        assert report["vacuum_included"] is True
        assert (tmp_path / "report.config.json").exists()

    def test_reference_subtraction(self, tmp_path):
        total, ref, report_path = (
            tmp_path / "total.csv", tmp_path / "ref.csv", tmp_path / "report.json",
        )
        run_cli(
            "simulate", "--state", "coherent", "--nbar", "0.5", "--added-noise", "2",
            "--n", "3e5", "--seed", "12", "--out", total,
        )
        run_cli(
            "simulate", "--state", "vacuum", "--added-noise", "2",
            "--n", "3e5", "--seed", "13", "--out", ref,
        )
        run_cli(
            "analyze", "--input", total, "--reference", ref,
            "--bootstrap", "120", "--seed", "2", "--out", report_path,
        )
        report = json.loads(report_path.read_text())
        assert report["vacuum_included"] is False
        assert abs(report["n_mean"] - 0.5) < 5 * report["errors"]["n_mean"]

    def test_missing_input_is_io_error(self, tmp_path):
        run_cli(
            "analyze", "--input", tmp_path / "missing.csv",
            "--out", tmp_path / "r.json", expect=3,
        )


class TestClassify:
    def test_pipeline_from_analyze(self, tmp_path):
        batch_path, stats_path, verdict_path = (
            tmp_path / "b.csv", tmp_path / "s.json", tmp_path / "v.json",
        )
        run_cli(
            "simulate", "--state", "thermal", "--nbar", "1",
            "--n", "2e5", "--seed", "21", "--out", batch_path,
        )
        run_cli(
            "analyze", "--input", batch_path, "--bootstrap", "120",
            "--seed", "3", "--out", stats_path,
        )
        run_cli(
            "classify", "--input", stats_path, "--out", verdict_path,
            "--boundary-out", tmp_path / "boundary.csv",
        )
        verdict = json.loads(verdict_path.read_text())
        assert verdict["verdict"] != "nonclassical"
        assert (tmp_path / "boundary.csv").exists()

    def test_exact_squeezed_input(self, tmp_path):
        stats_path, verdict_path = tmp_path / "s.json", tmp_path / "v.json"
        n = math.sinh(0.1) ** 2
        var = math.sinh(0.2) ** 2 / 2
        third = math.sinh(0.2) ** 2 * math.cosh(0.2)
        io.write_report(
            {"n_mean": n, "n_var": var, "n_skew3": third, "fano": var / n}, stats_path
        )
        run_cli(
            "classify", "--input", stats_path, "--k-sigma", "0", "--out", verdict_path
        )
        assert json.loads(verdict_path.read_text())["verdict"] == "nonclassical"

    def test_missing_errors_with_default_k_sigma(self, tmp_path):
        stats_path = tmp_path / "s.json"
        io.write_report({"n_mean": 1.0, "n_var": 1.0, "n_skew3": 1.0}, stats_path)
        run_cli("classify", "--input", stats_path, "--out", tmp_path / "v.json", expect=2)


class TestWideband:
    def test_pulse_report(self, tmp_path):
        trace_path, report_path, quad_path = (
            tmp_path / "t.csv", tmp_path / "w.json", tmp_path / "xp.csv",
        )
        # amplitude tuned for a 100-photon pulse at 5 GHz, 50 ns
        amplitude = math.sqrt(
            100 * 6.62607015e-34 * 5e9 * 2 * 50.0 / (50e-9 * math.sqrt(math.pi))
        )
        run_cli(
            "simulate", "--kind", "trace", "--carrier", "5e9", "--sigma-t", "50e-9",
            "--amplitude", amplitude, "--fs", "25e9", "--duration", "500e-9",
            "--seed", "4", "--out", trace_path,
        )
        run_cli(
            "wideband", "--input", trace_path, "--out", report_path,
            "--quadratures-out", quad_path,
        )
        report = json.loads(report_path.read_text())
        assert report["photons"] == pytest.approx(100.0, rel=0.01)
        assert report["ratio_to_hnu0"] == pytest.approx(1.0, abs=0.01)
        assert report["photons_spectral"] == pytest.approx(report["photons"], rel=1e-9)
        header = quad_path.read_text().splitlines()[0]
        assert header == "t,x,p"

    def test_zero_trace(self, tmp_path):
        trace_path, report_path = tmp_path / "z.csv", tmp_path / "z.json"
        from photocount.sampler import TimeTrace

        io.write_timetrace(TimeTrace(1e9, 50.0, np.zeros(128)), trace_path)
        run_cli("wideband", "--input", trace_path, "--out", report_path)
        report = json.loads(report_path.read_text())
        assert report["energy_J"] == 0.0
        assert report["photons"] == 0.0


class TestConfigHandling:
    def test_config_file_with_flag_override(self, tmp_path):
        config = tmp_path / "run.json"
        config.write_text(
            json.dumps(
                {
                    "command": "simulate",
                    "state": "vacuum",
                    "n": 1000,
                    "seed": 5,
                    "out": str(tmp_path / "from_config.csv"),
                }
            )
        )
        out_override = tmp_path / "override.csv"
        run_cli("simulate", "--config", config, "--out", out_override)
        assert out_override.exists()
        resolved = json.loads((tmp_path / "override.config.json").read_text())
        assert resolved["n"] == 1000
        assert resolved["out"] == str(out_override)

    def test_unknown_config_key_rejected(self, tmp_path):
        config = tmp_path / "run.json"
        config.write_text(json.dumps({"state": "vacuum", "n": 100, "banana": 1}))
        run_cli("simulate", "--config", config, "--out", tmp_path / "x.csv", expect=2)

    def test_config_for_wrong_command_rejected(self, tmp_path):
        config = tmp_path / "run.json"
        config.write_text(json.dumps({"command": "analyze"}))
        run_cli("simulate", "--config", config, "--out", tmp_path / "x.csv", expect=2)

    def test_unknown_flag_exits_2(self):
        run_cli("simulate", "--frobnicate", "1", expect=2)


class TestVerifyOracle:
    def test_passes_and_prints_per_check_lines(self):
        result = run_cli("verify-oracle", "--dim", "24", "--max-k", "2")
        lines = result.stdout.splitlines()
        assert any("symmetric sum identity k=1" in line for line in lines)
        assert any("closed loop" in line for line in lines)
        assert all(not line.startswith("FAIL") for line in lines)
