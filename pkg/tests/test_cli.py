import json
import subprocess
import sys
from importlib import resources

import pytest

from coordpursuit import scenario
from coordpursuit.cli import EXIT_CONFIG, EXIT_NO_CAPTURE, EXIT_OK, main


@pytest.fixture
def golden_path(tmp_path):
    p = tmp_path / "golden.json"
    scenario.dump(scenario.builtin("golden"), p)
    return str(p)


def test_params_json(golden_path, capsys):
    assert main(["params", golden_path, "--json"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["axis_j"] == 1
    assert doc["T_bound"] == pytest.approx(706.63, abs=0.01)


def test_params_text(golden_path, capsys):
    assert main(["params", golden_path]) == EXIT_OK
    out = capsys.readouterr().out
    assert "T_bound" in out and "pursuer 2" in out


def test_run_writes_outputs(golden_path, tmp_path, capsys):
    trace, csv, report = tmp_path / "t.ndjson", tmp_path / "t.csv", tmp_path / "r.json"
    code = main(["run", golden_path, "--trace", str(trace), "--csv", str(csv), "--report", str(report)])
    assert code == EXIT_OK
    assert "captured by pursuer 1" in capsys.readouterr().out
    doc = json.loads(report.read_text())
    assert doc["capturing_pursuer"] == 1
    assert any(e["kind"] == "capture" for e in doc["events"])
    assert trace.read_text().count("\n") == csv.read_text().count("\n") - 1


def test_run_evader_override(golden_path, capsys):
    code = main(["run", golden_path, "--evader", '{"kind": "window_splitter", "overdraw_fraction": 0.05}'])
    assert code == EXIT_OK
    assert "captured by pursuer 2" in capsys.readouterr().out


def test_exploratory_exit_codes(tmp_path):
    sc = scenario.builtin("golden")
    doc = scenario.scenario_to_dict(sc)
    doc["evader"]["budget"] = [3.0, 3.0]
    doc["evader"]["policy"] = {"kind": "window_splitter", "overdraw_fraction": 0.05}
    doc["exploratory"] = True
    p = tmp_path / "explore.json"
    p.write_text(json.dumps(doc))
    assert main(["run", str(p)]) == EXIT_NO_CAPTURE
    assert main(["run", str(p), "--evader", "boundary_hugger"]) == EXIT_OK
    doc["exploratory"] = False
    p.write_text(json.dumps(doc))
    assert main(["run", str(p)]) == EXIT_CONFIG


def test_config_errors(tmp_path, capsys):
    assert main(["run", str(tmp_path / "missing.json")]) == EXIT_CONFIG
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["params", str(bad)]) == EXIT_CONFIG
    bad.write_text(json.dumps({"schema": 99}))
    assert main(["params", str(bad)]) == EXIT_CONFIG
    assert "error:" in capsys.readouterr().err


def test_small_verify(tmp_path, capsys):
    assert main(["verify", "--n", "3", "--seed", "2", "--policies", "idle,greedy_flee", "--out", str(tmp_path)]) == EXIT_OK
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["runs"] == 6 and summary["passed"] == 6


def test_scenario_round_trip(golden_path):
    sc = scenario.load(golden_path)
    assert scenario.scenario_from_dict(json.loads(scenario.dumps(sc))) == sc
    assert scenario.dumps(sc) == scenario.dumps(scenario.builtin("golden"))


def test_module_entry_point(golden_path):
    out = subprocess.run([sys.executable, "-m", "coordpursuit", "params", golden_path, "--json"],
                         capture_output=True, text=True, check=True)
    assert json.loads(out.stdout)["axis_j"] == 1
