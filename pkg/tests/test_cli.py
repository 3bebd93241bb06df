"""Command-line runner: reports, determinism, exit codes."""

import json
import subprocess
import sys
from fractions import Fraction

import pytest

import betascenery as bs


def run_cli(args, cwd):
    return subprocess.run([sys.executable, "-m", "betascenery"] + list(args),
                          cwd=cwd, capture_output=True, text=True)


@pytest.fixture()
def ifs_file(tmp_path):
    p = tmp_path / "mt.json"
    p.write_text(json.dumps(
        {"maps": [{"s": "1/3", "t": "0"}, {"s": "1/3", "t": "2/3"}]}))
    return p


class TestReports:

    def test_pisot_pass(self, tmp_path):
        r = run_cli(["--out-dir", "out", "pisot", "golden"], tmp_path)
        assert r.returncode == 0
        rep = json.loads((tmp_path / "out" / "pisot_report.json").read_text())
        assert rep["status"] == "pass"
        assert rep["results"]["pisot"] is True
        assert rep["results"]["kind"] == "algebraic"

    def test_pisot_negative_case_still_exits_zero(self, tmp_path):
        # reporting a non-Pisot number is a successful run, not a failure
        r = run_cli(["--out-dir", "out", "pisot", "x^2 - 2"], tmp_path)
        assert r.returncode == 0
        rep = json.loads((tmp_path / "out" / "pisot_report.json").read_text())
        assert rep["results"]["pisot"] is False

    def test_model_writes_loadable_model(self, tmp_path, ifs_file):
        r = run_cli(["--out-dir", "out", "model", ifs_file.name], tmp_path)
        assert r.returncode == 0
        m = bs.Model.from_json((tmp_path / "out" / "model.json").read_text())
        assert m.n_components == 1
        rep = json.loads((tmp_path / "out" / "model_report.json").read_text())
        assert rep["results"]["n_components"] == 1
        assert rep["results"]["has_reflection"] is False

    def test_expand_digits_match_library(self, tmp_path):
        r = run_cli(["--out-dir", "out", "expand", "--beta", "golden",
                     "--x", "1/2", "--digits", "40"], tmp_path)
        assert r.returncode == 0
        lines = (tmp_path / "out" / "expand.csv").read_text().splitlines()
        assert lines[0].startswith("point_id,")
        got = lines[1].split(",")[4].split(" ")
        rec = bs.beta_orbit(bs.BetaBase(bs.named_constant("golden")),
                            Fraction(1, 2), 40)
        assert [int(d) for d in got] == list(rec.digits)

    def test_parry_report_has_golden_pieces(self, tmp_path):
        r = run_cli(["--out-dir", "out", "parry", "--beta", "golden"],
                    tmp_path)
        assert r.returncode == 0
        rep = json.loads((tmp_path / "out" / "parry_report.json").read_text())
        assert rep["results"]["pieces"] == 2
        csv_lines = (tmp_path / "out" / "parry.csv").read_text().splitlines()
        assert len(csv_lines) == 3  # header + 2 pieces

    def test_spectrum_verdict_table(self, tmp_path, ifs_file):
        r = run_cli(["--out-dir", "out", "spectrum", ifs_file.name,
                     "--beta", "2", "--beta", "3"], tmp_path)
        assert r.returncode == 0
        rep = json.loads(
            (tmp_path / "out" / "spectrum_report.json").read_text())
        by_beta = {row["beta"]: row for row in rep["results"]["table"]}
        assert by_beta["2"]["verdict"] == "normality_implied"
        assert by_beta["3"]["verdict"] == "inconclusive"
        assert by_beta["3"]["relations"][0]["verdict"] == "dependent"

    def test_normality_check_and_csv(self, tmp_path, ifs_file):
        r = run_cli(["--out-dir", "out", "normality", ifs_file.name,
                     "--beta", "2", "--n-points", "3",
                     "--n-digits", "300",
                     "--max-mean-discrepancy", "0.2"], tmp_path)
        assert r.returncode == 0
        rep = json.loads(
            (tmp_path / "out" / "normality_report.json").read_text())
        assert rep["checks"][0]["name"] == "mean_discrepancy"
        assert rep["checks"][0]["pass"] is True
        freqs = rep["results"]["mean_digit_freqs"]
        assert len(freqs) == 2 and abs(sum(freqs) - 1.0) < 1e-9
        lines = (tmp_path / "out" / "normality.csv").read_text().splitlines()
        assert len(lines) == 4

    def test_scenery_checks(self, tmp_path, ifs_file):
        r = run_cli(["--out-dir", "out", "scenery", ifs_file.name,
                     "--T", "30", "--n-q", "300", "--tolerance", "0.5",
                     "--dump-windows", "2"], tmp_path)
        assert r.returncode == 0
        rep = json.loads(
            (tmp_path / "out" / "scenery_report.json").read_text())
        names = [c["name"] for c in rep["checks"]]
        assert names == ["max_panel_distance", "trivial_contrast"]
        assert all(c["pass"] for c in rep["checks"])
        assert rep["results"]["trivial_contrast"] > 0.2
        assert (tmp_path / "out" / "windows.csv").exists()


class TestDeterminism:

    def test_byte_identical_across_directories(self, tmp_path, ifs_file):
        for d in ("a", "b"):
            r = run_cli(["--seed", "5", "--out-dir", d, "sample",
                         ifs_file.name, "--count", "400"], tmp_path)
            assert r.returncode == 0
        assert (tmp_path / "a" / "samples.csv").read_bytes() == \
               (tmp_path / "b" / "samples.csv").read_bytes()
        assert (tmp_path / "a" / "sample_report.json").read_bytes() == \
               (tmp_path / "b" / "sample_report.json").read_bytes()

    def test_seed_changes_samples(self, tmp_path, ifs_file):
        for seed, d in ((5, "a"), (6, "b")):
            run_cli(["--seed", str(seed), "--out-dir", d, "sample",
                     ifs_file.name, "--count", "400"], tmp_path)
        assert (tmp_path / "a" / "samples.csv").read_bytes() != \
               (tmp_path / "b" / "samples.csv").read_bytes()

    def test_wall_clock_stays_out_of_reports(self, tmp_path, ifs_file):
        r = run_cli(["--out-dir", "out", "sample", ifs_file.name,
                     "--count", "50"], tmp_path)
        assert "elapsed=" in r.stdout
        rep_text = (tmp_path / "out" / "sample_report.json").read_text()
        assert "elapsed" not in rep_text

    def test_threads_flag_does_not_change_output(self, tmp_path, ifs_file):
        for th, d in (("1", "a"), ("4", "b")):
            run_cli(["--threads", th, "--out-dir", d, "sample",
                     ifs_file.name, "--count", "400"], tmp_path)
        assert (tmp_path / "a" / "sample_report.json").read_bytes() == \
               (tmp_path / "b" / "sample_report.json").read_bytes()

    def test_config_round_trip(self, tmp_path, ifs_file):
        r = run_cli(["--out-dir", "a", "scenery", ifs_file.name,
                     "--T", "30", "--n-q", "300", "--tolerance", "0.5"],
                    tmp_path)
        assert r.returncode == 0
        # replay from the report's own config echo
        r2 = run_cli(["--config", "a/scenery_report.json", "--out-dir", "b",
                      "scenery", ifs_file.name], tmp_path)
        assert r2.returncode == 0
        assert (tmp_path / "a" / "scenery_report.json").read_bytes() == \
               (tmp_path / "b" / "scenery_report.json").read_bytes()

    def test_explicit_flag_beats_config(self, tmp_path, ifs_file):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"count": 100, "seed": 3}))
        r = run_cli(["--config", cfg.name, "--out-dir", "out", "sample",
                     ifs_file.name, "--count", "25"], tmp_path)
        assert r.returncode == 0
        rep = json.loads(
            (tmp_path / "out" / "sample_report.json").read_text())
        assert rep["config"]["count"] == 25     # flag wins
        assert rep["config"]["seed"] == 3       # config fills the rest


class TestExitCodes:

    def test_tolerance_failure_is_exit_2(self, tmp_path, ifs_file):
        r = run_cli(["--out-dir", "out", "disintegration", ifs_file.name,
                     "--count", "2000", "--tolerance", "0.0001"], tmp_path)
        assert r.returncode == 2
        rep = json.loads(
            (tmp_path / "out" / "disintegration_report.json").read_text())
        assert rep["status"] == "fail"
        assert rep["checks"][0]["pass"] is False

    def test_disintegration_passes_at_sane_tolerance(self, tmp_path,
                                                     ifs_file):
        r = run_cli(["--out-dir", "out", "disintegration", ifs_file.name,
                     "--count", "20000", "--tolerance", "0.02"], tmp_path)
        assert r.returncode == 0

    def test_non_pisot_base_is_exit_1(self, tmp_path, ifs_file):
        r = run_cli(["--out-dir", "out", "spectrum", ifs_file.name,
                     "--beta", "x^2 - 2"], tmp_path)
        assert r.returncode == 1
        assert "not Pisot" in r.stderr

    def test_missing_file_is_exit_1(self, tmp_path):
        r = run_cli(["--out-dir", "out", "model", "nosuch.json"], tmp_path)
        assert r.returncode == 1
        assert "error:" in r.stderr

    def test_missing_required_flag_is_exit_1(self, tmp_path):
        r = run_cli(["--out-dir", "out", "expand", "--x", "1/2"], tmp_path)
        assert r.returncode == 1
        assert "--beta is required" in r.stderr

    def test_bad_truncation_is_exit_1(self, tmp_path):
        r = run_cli(["--out-dir", "out", "parry", "--beta", "tribonacci",
                     "--truncation", "-3"], tmp_path)
        assert r.returncode == 1

    def test_bad_ifs_json_is_exit_1(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"maps": [{"s": "3/2", "t": "0"}]}')  # expanding
        r = run_cli(["--out-dir", "out", "model", "bad.json"], tmp_path)
        assert r.returncode == 1
