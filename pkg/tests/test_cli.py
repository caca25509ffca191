import json
import os

import pytest
from mpmath import mpf

from partition_well.cli import main


def run_cli(args):
    return main(args)


class TestShowConfig:
    def test_defaults_printed(self, capsys):
        assert run_cli(["show-config"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["schema_version"] == "1"
        assert doc["config"]["statistics"] == "boson"
        assert doc["config"]["N"] == 100

    def test_config_file_and_flag_precedence(self, tmp_path, capsys, monkeypatch):
        cfg = tmp_path / "run.conf"
        cfg.write_text("stat=fermion\nN=7\ndigits=9\n# comment line\n")
        monkeypatch.setenv("PARTITION_WELL_CONFIG", str(cfg))
        assert run_cli(["show-config"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["config"]["statistics"] == "fermion"
        assert doc["config"]["N"] == 7
        # flags override the file
        assert run_cli(["show-config", "--N", "12"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["config"]["N"] == 12
        assert doc["config"]["statistics"] == "fermion"

    def test_unknown_config_key_rejected(self, tmp_path, monkeypatch):
        cfg = tmp_path / "run.conf"
        cfg.write_text("colour=blue\n")
        monkeypatch.setenv("PARTITION_WELL_CONFIG", str(cfg))
        assert run_cli(["show-config"]) == 2

    def test_missing_config_file(self, monkeypatch):
        monkeypatch.setenv("PARTITION_WELL_CONFIG", "/nonexistent/path.conf")
        assert run_cli(["show-config"]) == 2


class TestCurve:
    def test_csv_structure_and_reproducibility(self, tmp_path):
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        args = ["curve", "--stat", "boson", "--N", "5", "--t", "0.5:50:5:log",
                "--digits", "12"]
        assert run_cli(args + ["--out", str(out1)]) == 0
        assert run_cli(args + ["--out", str(out2)]) == 0
        data1 = out1.read_bytes()
        assert data1 == out2.read_bytes()
        lines = data1.decode().splitlines()
        assert lines[0] == "t,alpha_plus,alpha_minus,f_plus,f_minus,delta_f,delta_f_error"
        assert len(lines) == 6
        ts = [float(row.split(",")[0]) for row in lines[1:]]
        assert ts == sorted(ts)

    def test_json_format(self, tmp_path):
        out = tmp_path / "c.json"
        assert run_cli(["curve", "--stat", "fermion", "--N", "4",
                        "--t", "1:10:3:linear", "--format", "json",
                        "--out", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert doc["schema_version"] == "1"
        assert len(doc["rows"]) == 3
        row = doc["rows"][0]
        assert float(row["delta_f"]) > 0
        assert float(row["f_minus"]) - float(row["f_plus"]) == pytest.approx(
            float(row["delta_f"]), rel=1e-9)

    def test_parallel_jobs_identical_output(self, tmp_path):
        base = ["curve", "--stat", "boson", "--N", "5", "--t", "0.5:50:4:log"]
        out1 = tmp_path / "serial.csv"
        out2 = tmp_path / "parallel.csv"
        assert run_cli(base + ["--out", str(out1)]) == 0
        assert run_cli(base + ["--jobs", "2", "--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_invalid_grid_exit_2(self):
        assert run_cli(["curve", "--t", "5:1:10:log"]) == 2
        assert run_cli(["curve", "--t", "1:5:10:cubic"]) == 2
        assert run_cli(["curve", "--t", "1:5"]) == 2

    def test_boson_zero_t_anchor_in_output(self, tmp_path):
        out = tmp_path / "z.csv"
        assert run_cli(["curve", "--stat", "boson", "--N", "100",
                        "--t", "0.001:0.001:1:log", "--out", str(out)]) == 0
        row = out.read_text().splitlines()[1].split(",")
        assert float(row[5]) == pytest.approx(75.0, abs=1e-6)


class TestCompare:
    def test_unknown_name_exit_2(self, capsys):
        assert run_cli(["compare", "--approx", "extrapolation"]) == 2
        err = capsys.readouterr().err
        assert "valid names" in err

    def test_wrong_statistics_exit_2(self):
        assert run_cli(["compare", "--stat", "boson", "--approx",
                        "fermion_stoner"]) == 2

    def test_high_next_errors_decrease(self, tmp_path):
        out = tmp_path / "cmp.json"
        assert run_cli(["compare", "--stat", "boson", "--N", "100",
                        "--t", "1e6:1e8:3:log", "--approx", "high_next",
                        "--format", "json", "--out", str(out)]) == 0
        doc = json.loads(out.read_text())
        errs = [float(r["abs_error"]) for r in doc["rows"]]
        assert errs == sorted(errs, reverse=True)
        assert doc["summary"][0]["approximation"] == "high_next"

    def test_domain_failures_leave_blank_cells(self, tmp_path):
        # the stoner inversion only covers part of the grid
        out = tmp_path / "cmp.csv"
        assert run_cli(["compare", "--stat", "fermion", "--N", "20",
                        "--t", "10:4000:4:log", "--approx",
                        "fermion_stoner,fermion_two_level",
                        "--out", str(out)]) == 0
        rows = [l for l in out.read_text().splitlines()
                if not l.startswith("#") and l]
        stoner_rows = [r for r in rows[1:] if r.split(",")[2] == "fermion_stoner"]
        assert any(r.endswith(",,,") or ",,," in r for r in stoner_rows)

    def test_summary_lines_in_csv(self, tmp_path):
        out = tmp_path / "cmp2.csv"
        assert run_cli(["compare", "--stat", "boson", "--N", "50",
                        "--t", "20:60:3:linear", "--approx", "boson_quad_naive",
                        "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert any(l.startswith("# summary ") for l in lines)


class TestReport:
    def test_zero_t(self, tmp_path):
        out = tmp_path / "r.json"
        assert run_cli(["report", "--kind", "zero_t", "--stat", "fermion",
                        "--N", "100", "--format", "json", "--out", str(out)]) == 0
        rep = json.loads(out.read_text())["report"]
        assert rep["delta_f"] == "5025"
        assert rep["f_minus"] == "338350"

    def test_transfer(self, capsys):
        assert run_cli(["report", "--kind", "transfer", "--stat", "boson",
                        "--N", "100", "--format", "json"]) == 0
        rep = json.loads(capsys.readouterr().out)["report"]
        assert float(rep["n_plus"]) == pytest.approx(160.0)
        assert float(rep["n_minus"]) == pytest.approx(40.0)

    def test_equilibrium_shift_zero_t(self, capsys):
        assert run_cli(["report", "--kind", "equilibrium_shift", "--stat",
                        "boson", "--format", "json"]) == 0
        rep = json.loads(capsys.readouterr().out)["report"]
        assert float(rep["xi"]) == pytest.approx(0.227, abs=5e-4)
        assert rep["method"] == "zero_t_closed_form"

    def test_minimum_small_fermion(self, capsys):
        assert run_cli(["report", "--kind", "minimum", "--stat", "fermion",
                        "--N", "20", "--format", "json"]) == 0
        rep = json.loads(capsys.readouterr().out)["report"]
        ratio = float(rep["t_min_over_scale"])
        assert 0.3 < ratio < 0.7

    def test_inflections_require_fermion(self):
        assert run_cli(["report", "--kind", "inflections", "--stat", "boson"]) == 2

    def test_unknown_kind_usage_error(self):
        assert run_cli(["report", "--kind", "entropy"]) == 2


def test_env_config_applies_to_curve(tmp_path, monkeypatch, capsys):
    cfg = tmp_path / "pw.conf"
    cfg.write_text("stat=boson\nN=3\nt=1:2:2:linear\ndigits=10\n")
    monkeypatch.setenv("PARTITION_WELL_CONFIG", str(cfg))
    assert run_cli(["curve"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 3
