"""Command line: outputs, determinism and exit codes."""

import json
import subprocess
import sys

import pytest

from loopstrata import cli
from loopstrata.atlas import Report


def _run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_atlas_gl2(capsys):
    code, out, _ = _run(capsys, "atlas", "--group", "GL:2", "--mu", "1,0")
    data = json.loads(out)
    assert code == 0
    assert [s["w"] for s in data["strata"]] == ["e", "s1"]
    assert data["closure"] == [[True, True], [False, True]]
    assert data["strata"][0]["generic"]["newton"] == ["1/2", "1/2"]


def test_atlas_is_deterministic_across_jobs(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert _run(capsys, "atlas", "--group", "GSp:4", "--out", str(a), "--dot")[0] == 0
    assert _run(capsys, "atlas", "--group", "GSp:4", "--out", str(b), "--jobs", "2")[0] == 0
    assert a.read_text() == b.read_text()
    dot = (tmp_path / "a.dot").read_text()
    assert dot.startswith("digraph strata {") and dot.count("->") == 3


def test_classify(capsys):
    code, out, _ = _run(capsys, "classify", "--group", "GL:3", "s1*t[1,0,0]")
    data = json.loads(out)
    assert code == 0
    assert data["class"] == {"kappa": [1], "newton": ["1/2", "1/2", "0"]}
    assert data["truncation_type"] == {"w": "s1", "mu": [1, 0, 0]}
    assert data["fundamental_for"]


def test_truncate_with_oracle(tmp_path, capsys):
    f = tmp_path / "g.txt"
    f.write_text("field 2 1\nprecision 4\n0, 1\nt, 0\n")
    code, out, _ = _run(capsys, "truncate", str(f), "--oracle")
    data = json.loads(out)
    assert code == 0 and data["oracle_agrees"] and data["type"] == {"w": "e", "mu": [1, 0]}


def test_verify_single_suite(capsys):
    code, out, _ = _run(capsys, "verify", "--group", "GL:2", "--mu", "1,0", "--suite", "cor15")
    data = json.loads(out)
    assert code == 0 and data["passed"] and data["suites"][0]["name"] == "cor15"


def test_verify_failure_exit_code(monkeypatch, capsys):
    from loopstrata import suites

    monkeypatch.setattr(suites, "suite_generic_minimal", lambda *a, **k: Report("cor15", 1, ["forced"]))
    code, out, _ = _run(capsys, "verify", "--group", "GL:2", "--mu", "1,0", "--suite", "cor15")
    assert code == 1 and not json.loads(out)["passed"]


@pytest.mark.parametrize("argv", [
    ["classify", "--group", "GL:3", "s7"],
    ["atlas", "--group", "XX:3", "--mu", "1,0"],
    ["atlas", "--group", "GL:2"],
    ["atlas", "--group", "GL:2", "--mu", "0,1"],
    ["truncate", "/nonexistent/file"],
    ["atlas", "--group", "GL:2", "--mu", "1,0", "--jobs", "0"],
])
def test_config_errors(argv, capsys):
    code, _, err = _run(capsys, *argv)
    assert code == 2 and err.startswith("error:")


def test_budget_exit_code_names_the_stratum(capsys):
    code, _, err = _run(capsys, "atlas", "--group", "GL:3", "--mu", "2,1,0", "--budget", "8")
    assert code == 3 and "stratum (" in err


def test_precision_exit_code(tmp_path, capsys):
    f = tmp_path / "g.txt"
    f.write_text("field 2 1\nprecision 1\n0, 1\nt, 0\n")
    code, _, err = _run(capsys, "truncate", str(f))
    assert code == 4 and "required precision 2" in err


def test_module_and_console_entry_points():
    out = subprocess.run([sys.executable, "-m", "loopstrata", "classify", "--group", "GL:2", "tau[1,0]"],
                         capture_output=True, text=True, check=True).stdout
    assert json.loads(out)["truncation_type"] == {"w": "e", "mu": [1, 0]}
    res = subprocess.run(["loopstrata", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "verify" in res.stdout
