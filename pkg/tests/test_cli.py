import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from stokes_flow.cli import main, parse_config
from stokes_flow.scenarios import vesicle_analytic, VesicleParams
from stokes_flow.verification import ConvergenceReport


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


class TestSolve:
    def test_projection_csv(self, tmp_path, capsys):
        out = tmp_path / "sol.csv"
        code, _, err = run(["solve", "--method", "projection", "--scenario", "vesicle", "--M", "20",
                            "--steps", "1", "--out", str(out)], capsys)
        assert code == 0, err
        lines = out.read_text().splitlines()
        assert lines[0].startswith("# ") and "interpolated" in lines[0]
        rows = list(csv.reader(lines[1:]))
        assert rows[0] == ["x", "y", "p", "u", "v"]
        data = np.array(rows[1:], dtype=float)
        assert data.shape == (400, 5)
        # first velocity node sits one full cell in from the lower-left corner
        assert data[0, :2] == pytest.approx([1.0, -9.0])
        p_exact = vesicle_analytic(VesicleParams(), data[:, 0], data[:, 1])[0]
        assert np.abs(data[:, 2] - p_exact).max() < 0.05

    def test_identical_runs_identical_files(self, tmp_path, capsys):
        paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
        for p in paths:
            assert run(["solve", "--method", "saddle-point", "--scenario", "pipe", "--M", "8", "--out", str(p)],
                       capsys)[0] == 0
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_pipe_values_full_precision(self, capsys):
        code, out, _ = run(["solve", "--method", "decoupling", "--scenario", "pipe", "--M", "5", "--p0", "0"], capsys)
        assert code == 0
        row = out.splitlines()[2].split(",")
        assert float(row[2]) == pytest.approx(10.0, abs=1e-10)
        assert float(row[3]) == pytest.approx(-2.25, abs=1e-10)

    def test_json_format(self, capsys):
        code, out, _ = run(["solve", "--method", "decoupling", "--M", "6", "--format", "json"], capsys)
        d = json.loads(out)
        assert code == 0 and d["columns"] == ["x", "y", "p", "u", "v"] and len(d["rows"]) == 36


class TestConverge:
    def test_csv_and_sidecar(self, tmp_path, capsys):
        out = tmp_path / "conv.csv"
        code, _, err = run(["converge", "--method", "projection", "--scenario", "vesicle", "--Ms", "25,50,75,100",
                            "--out", str(out)], capsys)
        assert code == 0, err
        rows = ConvergenceReport.rows_from_csv(out.read_text())
        assert [r[0] for r in rows] == [25, 50, 75, 100]
        side = json.loads(out.with_suffix(".json").read_text())
        assert min(side["fitted_order"].values()) >= 1.9
        # round trip is text exact
        assert ConvergenceReport.from_rows(rows, "vesicle", "projection").to_csv() == out.read_text()


class TestBench:
    def test_small(self, tmp_path, capsys):
        out = tmp_path / "t.csv"
        code, _, err = run(["bench", "--scenario", "vesicle", "--Ms", "8,12", "--repeats", "1", "--out", str(out)],
                           capsys)
        assert code == 0, err
        assert len(out.read_text().splitlines()) == 1 + 6
        side = json.loads(out.with_suffix(".json").read_text())
        assert side["ratios"]["Ms"] == [8, 12]


class TestCheckerboard:
    def test_contrast(self, capsys):
        code, out, _ = run(["checkerboard", "--format", "json"], capsys)
        d = json.loads(out)
        assert code == 0 and d["M"] == 20
        assert d["metric"]["collocated"] >= 100 * d["metric"]["staggered"]


class TestErrors:
    @pytest.mark.parametrize(
        "argv",
        [
            ["solve", "--bogus"],
            ["frobnicate"],
            ["solve", "--M", "2"],
            ["converge", "--Ms", "25"],
            ["converge", "--Ms", "50,25"],
            ["bench", "--repeats", "0"],
            ["solve", "--steps", "0"],
            ["solve", "--dt", "-1"],
            ["solve", "--method", "projection", "--scenario", "pipe"],
            ["solve", "--scenario", "pipe", "--R", "3"],
            ["solve", "--Ms", "abc"],
        ],
    )
    def test_usage_errors_single_line(self, argv, capsys):
        code, out, err = run(argv, capsys)
        assert code == 2
        assert len(err.strip().splitlines()) == 1 and err.startswith("error: kind=usage message=")

    def test_runtime_error_single_line(self, capsys):
        code, _, err = run(["solve", "--scenario", "vesicle", "--mu", "-1"], capsys)
        assert code == 1
        line = err.strip()
        assert "\n" not in line and line.startswith("error: kind=ValueError")
        assert json.loads(line.split("message=", 1)[1])


def test_config_defaults():
    cfg = parse_config(["solve"])
    assert (cfg.method, cfg.scenario, cfg.M, cfg.n_steps, cfg.dt_policy) == ("projection", "vesicle", 50, 1,
                                                                              "dx_squared")
    assert parse_config(["solve", "--dt", "0.01"]).dt_policy == 0.01


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "stokes_flow", "checkerboard", "--M", "10"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert res.stdout.splitlines()[0] == "grid_mode,metric"
