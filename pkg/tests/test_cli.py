import csv
import json
import subprocess
import sys

import pytest

from kobdyn import cli
from kobdyn.config import parse_config


def scenario(tmp_path, doc, name="s.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def run(tmp_path, doc, *extra, out="out"):
    code = cli.main([scenario(tmp_path, doc), "--out", str(tmp_path / out), *extra])
    report = tmp_path / out / "report.json"
    return code, (json.loads(report.read_text()) if report.exists() else None)


def test_disc_distance_scenario(tmp_path):
    code, rep = run(tmp_path, {"kind": "geometry", "domain": "disc", "z": 0, "w": 0.5})
    assert code == 0 and rep["schema"] == 1 and rep["status"] == "ok"
    assert abs(rep["result"]["value"] - 0.5493061443) < 1e-10
    text = (tmp_path / "out" / "report.txt").read_text()
    assert "value" in text and "0.549306144334" in text


@pytest.mark.parametrize(
    "doc, key, value",
    [({"query": "metric", "z": [0.5, 0], "v": [1, 0]}, "value", 4 / 3),
     ({"query": "k_region", "p": [1, 0], "z": [0.9, 0], "M": 10}, "inside", True),
     ({"query": "left_inverse", "p": [1, 0], "z": [0.3, 0.2]}, "value", [0.3, 0.0])],
)
def test_geometry_queries(tmp_path, doc, key, value):
    code, rep = run(tmp_path, {"kind": "geometry", **doc})
    assert code == 0
    got = rep["result"][key]
    assert got == pytest.approx(value, abs=1e-12)


def test_classify_moebius_fixed_point(tmp_path):
    code, rep = run(tmp_path, {"kind": "classify", "map": "DiscMoebius(3,1,1,3)", "p": -1})
    assert code == 0
    assert rep["result"]["kind"] == "RegularFixed"
    assert abs(rep["result"]["alpha"] - 2) < 1e-6


def test_classify_map_without_a_point(tmp_path):
    code, rep = run(tmp_path, {"kind": "classify", "map": "Diagonal(0.5, 0.5)"})
    assert code == 0 and rep["result"]["map_class"] == "StronglyElliptic"


def test_suite_flag_alone(tmp_path, capsys):
    code = cli.main(["--suite", "T9", "--out", str(tmp_path / "o")])
    assert code == 0
    rep = json.loads((tmp_path / "o" / "report.json").read_text())
    assert rep["result"]["verdict"] == "PASS" and rep["kind"] == "verify"
    assert "T9" in capsys.readouterr().out


def test_suite_flag_overrides_a_verify_scenario(tmp_path):
    code, rep = run(tmp_path, {"kind": "verify", "suite": "T4"}, "--suite", "T8")
    assert code == 0 and rep["result"]["suite"] == "T8"


def test_hypothesis_violation_exits_2(tmp_path):
    code, rep = run(tmp_path, {"kind": "backward", "map": "DiscMoebius(3,1,1,3)", "p": 1})
    assert code == 2 and rep["status"] == "hypothesis_violated" and rep["exit_code"] == 2
    assert rep["result"]["message"]


def test_common_fixed_point_violation_exits_2(tmp_path):
    doc = {"kind": "verify", "semigroup": "BallRotation(1, 0)", "p": [1, 0], "t0": 1, "t_grid": [0.5], "n": 5}
    code, rep = run(tmp_path, doc)
    assert code == 2 and rep["result"]["verdict"] == "HYPOTHESIS_VIOLATED"


def test_common_fixed_point_pass(tmp_path):
    doc = {"kind": "verify", "semigroup": "SiegelDilation", "p": [-1, 0], "t0": 1,
           "t_grid": [0.25, 0.5, 0.75], "n": 15}
    code, rep = run(tmp_path, doc)
    assert code == 0 and rep["result"]["verdict"] == "PASS"


@pytest.mark.parametrize(
    "doc",
    [{"kind": "classify", "map": "DiscMoebius(3,1,1,3)", "p": -1, "extra": 1},
     {"kind": "scan", "map": "SiegelMap(1)", "A": 0.5},
     {"kind": "geometry", "tolerances": {"threshold": -1}},
     {"kind": "verify", "suite": "T99"}],
)
def test_configuration_errors_exit_1(tmp_path, doc, capsys):
    code, rep = run(tmp_path, doc)
    assert code == 1 and rep is None
    assert "configuration error" in capsys.readouterr().err


def test_usage_errors(tmp_path):
    assert cli.main([]) == 1
    assert cli.main(["--suite", "T1", "--tol-scale", "0"]) == 1
    assert cli.main([str(tmp_path / "missing.json")]) == 1


def test_failing_suite_exits_1(tmp_path, monkeypatch):
    from kobdyn import ballgeo as bg

    real = bg.kobayashi_distance
    monkeypatch.setattr(bg, "kobayashi_distance", lambda z, w: 1.01 * real(z, w))
    code = cli.main(["--suite", "T1", "--out", str(tmp_path / "o")])
    rep = json.loads((tmp_path / "o" / "report.json").read_text())
    assert code == 1 and rep["status"] == "fail" and rep["result"]["verdict"] == "FAIL"


def test_scan_csv_output(tmp_path):
    doc = {"kind": "scan", "map": "SiegelMap(1)", "A": 3, "resolution_deg": 10, "output": {"csv": True}}
    code, rep = run(tmp_path, doc)
    assert code == 0 and len(rep["result"]["hits"]) == 2
    rows = list(csv.reader(open(tmp_path / "out" / "scan.csv")))
    assert "alpha" in rows[0] and len(rows) > 1


def test_backward_csv_name_and_output_dir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    doc = {"kind": "backward", "map": "DiscMoebius(3,1,1,3)", "p": -1, "w0": 0, "n": 5,
           "output": {"dir": "bw", "csv": "orbit.csv"}}
    assert cli.main([scenario(tmp_path, doc)]) == 0
    rows = list(csv.reader(open(tmp_path / "bw" / "orbit.csv")))
    assert len(rows) == 7


def test_semigroup_scenario(tmp_path):
    doc = {"kind": "semigroup", "semigroup": "SiegelDilation", "t_grid": [0.25, 0.5, 0.75, 1.0],
           "p": [-1, 0], "n_samples": 8}
    code, rep = run(tmp_path, doc)
    assert code == 0 and rep["result"]["semigroup_property"] is True
    assert abs(rep["result"]["lam"] - 2.718281828459045) < 1e-6


def test_reports_are_byte_identical_and_timing_is_separate(tmp_path):
    doc = {"kind": "classify", "map": "SiegelMap(1)", "p": [-1, 0]}
    path = scenario(tmp_path, doc)
    assert cli.main([path, "--out", str(tmp_path / "a")]) == 0
    assert cli.main([path, "--out", str(tmp_path / "b")]) == 0
    a = (tmp_path / "a" / "report.json").read_bytes()
    assert a == (tmp_path / "b" / "report.json").read_bytes()
    assert b"runtime" not in a
    timing = json.loads((tmp_path / "a" / "timing.json").read_text())
    assert timing["runtime_seconds"] >= 0


def test_run_scenario_directly():
    out = cli.run_scenario(parse_config({"kind": "geometry", "z": [0, 0], "w": [0.6, 0]}))
    assert out.exit_code == 0 and abs(out.result["value"] - 0.6931471805599453) < 1e-12
    rep = out.report()
    assert set(rep) == {"schema", "name", "kind", "status", "exit_code", "result", "diagnostics"}


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "kobdyn.cli", "--suite", "T8", "--out", str(tmp_path)],
                          capture_output=True, text=True, timeout=300)
    assert proc.returncode == 0 and "ok" in proc.stdout
