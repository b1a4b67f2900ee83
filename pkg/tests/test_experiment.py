"""End-to-end tests for the experiment runner, file formats, plots and CLI."""

import json

import numpy as np
import pytest

from fraclms import cli
from fraclms.configfile import bundled_path, loads
from fraclms.experiment import (
    FormatError,
    LABELS,
    SUMMARY_FIELDS,
    compare_to_reference,
    read_reference,
    read_summary,
    run_experiment,
)
from fraclms.metrics import EnsembleReport
from fraclms.plotting import emit_plot, plot_curves

SMALL = """\
[experiment]
snr_db = 10, 30
samples_per_run = 64
monte_carlo_runs = 3
rng_seed = 7
algorithms = lms, flms, rvss-flms

[plant]
coeffs = 0.9, 0.3, -0.1

[filter]
tap_count = 3
frac_order = 0.5
nu_init = 0.006
nu_f_init = 0.006
nu_min = 0.006
nu_max = 0.018
alpha = 0.5
beta = 0.5
gamma = 0.5
weight_init = 1e-20
"""


@pytest.fixture(scope="module")
def small_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("small_run")
    manifest = run_experiment(loads(SMALL), out)
    return out, manifest


class TestRunExperiment:
    def test_artifacts_exist(self, small_run):
        out, manifest = small_run
        assert (out / "summary.csv").exists()
        assert (out / "manifest.json").exists()
        for algo in ("lms", "flms", "rvss-flms"):
            for snr in ("10dB", "30dB"):
                assert (out / f"{algo}_{snr}.csv").exists()
        for kind in ("mse", "nwd"):
            for snr in ("10dB", "30dB"):
                assert (out / f"{kind}_{snr}.svg").exists()

    def test_manifest_references_written_files(self, small_run):
        out, _ = small_run
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["software_version"]
        assert manifest["timestamp"]
        assert (out / manifest["artifact_paths"]["summary"]).exists()
        for fname in manifest["artifact_paths"]["curves"].values():
            assert (out / fname).exists()
        for fname in manifest["artifact_paths"]["plots"].values():
            assert (out / fname).exists()

    def test_manifest_config_round_trips(self, small_run):
        out, _ = small_run
        manifest = json.loads((out / "manifest.json").read_text())
        assert loads(manifest["config_text"]) == loads(SMALL)

    def test_curve_schema(self, small_run):
        out, _ = small_run
        lines = (out / "lms_10dB.csv").read_text().splitlines()
        assert lines[0] == "iteration,mse_db,nwd_db"
        assert len(lines) == 1 + 64
        first = lines[1].split(",")
        assert first[0] == "0"
        float(first[1]), float(first[2])

    def test_summary_schema_and_order(self, small_run):
        out, _ = small_run
        rows = read_summary(out / "summary.csv")
        assert len(rows) == 6
        keys = [(r["algorithm"], r["snr_db"]) for r in rows]
        assert keys == [
            ("FLMS", 10.0),
            ("FLMS", 30.0),
            ("LMS", 10.0),
            ("LMS", 30.0),
            ("RVSS-FLMS", 10.0),
            ("RVSS-FLMS", 30.0),
        ]
        for r in rows:
            assert r["runs_used"] + r["runs_diverged"] == 3

    def test_byte_determinism(self, small_run, tmp_path):
        out, _ = small_run
        again = tmp_path / "again"
        run_experiment(loads(SMALL), again)
        for name in ("summary.csv", "rvss-flms_10dB.csv", "mse_10dB.svg"):
            assert (again / name).read_bytes() == (out / name).read_bytes(), name

    def test_parallel_matches_serial(self, small_run, tmp_path):
        out, _ = small_run
        par = tmp_path / "par"
        run_experiment(loads(SMALL), par, parallel=3)
        assert (par / "summary.csv").read_bytes() == (out / "summary.csv").read_bytes()

    def test_seed_override_changes_results(self, small_run, tmp_path):
        out, _ = small_run
        other = tmp_path / "other_seed"
        run_experiment(loads(SMALL), other, seed=8)
        assert (other / "summary.csv").read_bytes() != (out / "summary.csv").read_bytes()

    def test_invalid_config_lists_violations(self, tmp_path):
        from fraclms.configfile import ConfigError

        bad = loads(SMALL)
        import dataclasses

        bad = dataclasses.replace(bad, monte_carlo_runs=0)
        with pytest.raises(ConfigError, match="monte_carlo_runs"):
            run_experiment(bad, tmp_path / "nope")

    def test_runs_override(self, tmp_path):
        out = tmp_path / "short"
        run_experiment(loads(SMALL), out, runs=1)
        rows = read_summary(out / "summary.csv")
        assert all(r["runs_used"] == 1 for r in rows)


def summary_to_reference(rows, path):
    """Rewrite summary rows in the reference-table schema."""
    lines = ["algorithm,snr_db,mse_conv_iter,steady_mse_db,nwd_conv_iter,steady_nwd_db,time_s"]
    for r in rows:
        mi = "none" if r["mse_conv_iter"] is None else r["mse_conv_iter"]
        ni = "none" if r["nwd_conv_iter"] is None else r["nwd_conv_iter"]
        lines.append(
            f"{r['algorithm']},{r['snr_db']:g},{mi},{r['steady_mse_db']!r},"
            f"{ni},{r['steady_nwd_db']!r},1.0"
        )
    path.write_text("\n".join(lines) + "\n")


class TestCompareToReference:
    def test_self_comparison_passes(self, small_run, tmp_path):
        out, _ = small_run
        rows = read_summary(out / "summary.csv")
        ref = tmp_path / "self.reference"
        summary_to_reference(rows, ref)
        report = compare_to_reference(out / "summary.csv", ref)
        assert report.passed
        assert all(c.passed for c in report.cells)
        assert len(report.cells) == 6 * 4
        assert report.nwd_offset_db[rows[0]["algorithm"]] == pytest.approx(0.0, abs=1e-12)

    def test_single_bad_cell_fails_overall(self, small_run, tmp_path):
        out, _ = small_run
        rows = read_summary(out / "summary.csv")
        rows[0] = dict(rows[0], steady_mse_db=rows[0]["steady_mse_db"] + 1.0)  # 2x the 0.5 dB tol
        ref = tmp_path / "perturbed.reference"
        summary_to_reference(rows, ref)
        report = compare_to_reference(out / "summary.csv", ref)
        assert not report.passed
        failing = [c for c in report.cells if not c.passed]
        assert len(failing) == 1
        assert failing[0].quantity == "steady_mse_db"
        assert failing[0].algorithm == rows[0]["algorithm"]

    def test_reference_only_algorithms_are_skipped(self, small_run, tmp_path):
        out, _ = small_run
        rows = read_summary(out / "summary.csv")
        ref = tmp_path / "extra.reference"
        summary_to_reference(rows, ref)
        with ref.open("a") as fh:
            fh.write("AMFLMS,10,80,-10.22,120,-15.67,11.06\n")
        report = compare_to_reference(out / "summary.csv", ref)
        assert report.passed
        assert not any(c.algorithm == "AMFLMS" for c in report.cells)

    def test_iteration_factor_window(self, small_run, tmp_path):
        out, _ = small_run
        rows = read_summary(out / "summary.csv")
        target = dict(rows[0])
        target["mse_conv_iter"] = max(1, (target["mse_conv_iter"] or 1) * 3)  # outside factor 2
        ref = tmp_path / "iter.reference"
        summary_to_reference([target] + rows[1:], ref)
        report = compare_to_reference(out / "summary.csv", ref)
        bad = [c for c in report.cells if not c.passed]
        assert bad and all(c.quantity == "mse_conv_iter" for c in bad)

    def test_bundled_reference_parses(self):
        rows = read_reference(bundled_path("table1.reference"))
        assert len(rows) == 12
        by_key = {(r["algorithm"], r["snr_db"]): r for r in rows}
        assert by_key[("RVSS-FLMS", 10.0)]["steady_mse_db"] == -10.22
        assert by_key[("RVSS-FLMS", 40.0)]["mse_conv_iter"] == 65
        assert by_key[("FLMS", 30.0)]["steady_nwd_db"] == -25.06

    def test_schema_mismatch_raises(self, small_run, tmp_path):
        out, _ = small_run
        with pytest.raises(FormatError):
            compare_to_reference(out / "summary.csv", out / "summary.csv")
        with pytest.raises(FormatError):
            read_summary(bundled_path("table1.reference"))


def constant_report(level, n=20):
    curve = np.full(n, float(level))
    return EnsembleReport(
        mse_db=curve,
        nwd_db=curve,
        steady_mse_db=float(level),
        mse_conv_iter=0,
        steady_nwd_db=float(level),
        nwd_conv_iter=0,
        runs_used=1,
        runs_diverged=0,
    )


class TestPlots:
    def test_single_curve_single_polyline(self, tmp_path):
        path = tmp_path / "one.svg"
        emit_plot({"LMS": constant_report(-3.0)}, path, "mse")
        text = path.read_text()
        assert text.count("<polyline") == 1
        assert "LMS" in text
        assert "iteration" in text and "MSE (dB)" in text

    def test_two_curves_two_polylines_with_legend(self, tmp_path):
        path = tmp_path / "two.svg"
        emit_plot({"FLMS": constant_report(-3.0), "RVSS-FLMS": constant_report(-6.0)}, path, "nwd")
        text = path.read_text()
        assert text.count("<polyline") == 2
        assert "FLMS" in text and "RVSS-FLMS" in text

    def test_deterministic_bytes(self, tmp_path):
        reports = {"A": constant_report(-2.0), "B": constant_report(-9.0)}
        p1, p2 = tmp_path / "a.svg", tmp_path / "b.svg"
        emit_plot(reports, p1, "mse")
        emit_plot(reports, p2, "mse")
        assert p1.read_bytes() == p2.read_bytes()

    def test_bad_kind(self, tmp_path):
        with pytest.raises(ValueError):
            emit_plot({"A": constant_report(0.0)}, tmp_path / "x.svg", "psd")

    def test_empty_mapping(self, tmp_path):
        with pytest.raises(ValueError):
            plot_curves({}, tmp_path / "x.svg", "MSE (dB)")


class TestCli:
    @pytest.fixture(autouse=True)
    def plain_output(self, monkeypatch):
        monkeypatch.setenv("NO_COLOR", "1")

    def test_run_and_verify_roundtrip(self, tmp_path, capsys):
        config = tmp_path / "tiny.config"
        config.write_text(SMALL)
        out = tmp_path / "out"
        assert cli.main(["run", str(config), "--out", str(out)]) == 0
        printed = capsys.readouterr().out
        assert "RVSS-FLMS" in printed

        ref = tmp_path / "self.reference"
        summary_to_reference(read_summary(out / "summary.csv"), ref)
        assert cli.main(["verify", str(out / "summary.csv"), "--reference", str(ref)]) == 0
        printed = capsys.readouterr().out
        assert "overall: PASS" in printed

    def test_verify_failure_exit_code(self, tmp_path, capsys):
        config = tmp_path / "tiny.config"
        config.write_text(SMALL)
        out = tmp_path / "out"
        cli.main(["run", str(config), "--out", str(out)])
        capsys.readouterr()
        rows = read_summary(out / "summary.csv")
        rows[0] = dict(rows[0], steady_mse_db=rows[0]["steady_mse_db"] + 5.0)
        ref = tmp_path / "bad.reference"
        summary_to_reference(rows, ref)
        assert cli.main(["verify", str(out / "summary.csv"), "--reference", str(ref)]) == 1
        printed = capsys.readouterr().out
        assert "FAIL" in printed
        assert "mean NWD offset" in printed

    def test_verify_missing_file_exit_code(self, tmp_path):
        assert cli.main(["verify", str(tmp_path / "nope.csv"), "--reference", "table1.reference"]) == 2

    def test_invalid_config_exit_code(self, tmp_path, capsys):
        config = tmp_path / "bad.config"
        config.write_text(SMALL.replace("nu_max = 0.018", "nu_max = 0.001"))
        assert cli.main(["run", str(config), "--out", str(tmp_path / "o")]) == 2
        assert "nu_max" in capsys.readouterr().err

    def test_plot_command(self, tmp_path, capsys):
        config = tmp_path / "tiny.config"
        config.write_text(SMALL)
        out = tmp_path / "out"
        cli.main(["run", str(config), "--out", str(out)])
        capsys.readouterr()
        svg = tmp_path / "combined.svg"
        curves = [str(out / "lms_10dB.csv"), str(out / "flms_10dB.csv")]
        assert cli.main(["plot", *curves, "--kind", "mse", "--out", str(svg)]) == 0
        assert svg.read_text().count("<polyline") == 2

    def test_bench_flag_prints_timings(self, tmp_path, capsys):
        config = tmp_path / "tiny.config"
        config.write_text(SMALL)
        assert cli.main(["run", str(config), "--out", str(tmp_path / "o"), "--bench"]) == 0
        printed = capsys.readouterr().out
        assert "bench:" in printed

    def test_bundled_config_fallback(self, tmp_path, capsys):
        out = tmp_path / "from_bundled"
        assert cli.main(["run", "paper-x60.config", "--out", str(out), "--runs", "1"]) == 0
        assert (out / "summary.csv").exists()
        assert "bundled" in capsys.readouterr().out
