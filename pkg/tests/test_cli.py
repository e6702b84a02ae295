import csv
import hashlib
import json
import subprocess
import sys

import pytest

from z22susy.cli import main

SMALL = ["--n", "512", "--xmin", "-10", "--xmax", "10"]


def test_verify_passes(tmp_path, capsys):
    out = tmp_path / "verify.json"
    assert main(["verify", "--json", str(out)]) == 0
    text = capsys.readouterr().out
    assert text.count("PASS") == 5
    report = json.loads(out.read_text())
    assert report["passed"] is True
    assert set(report["suites"]) == {
        "z22_lie_axioms",
        "bracket_table",
        "supertranslation",
        "central_relation",
        "bd_morphism",
    }
    assert report["config"]["subcommand"] == "verify"


def test_verify_detects_injected_fault(capsys):
    assert main(["verify", "--inject-fault", "alpha2"]) == 1
    out = capsys.readouterr().out
    assert "bracket_table     FAIL" in out


def test_verify_internal_error_exit_code(capsys):
    assert main(["verify", "--inject-fault", "crash"]) == 2


def test_solve_oscillator(tmp_path, capsys):
    js, cs = tmp_path / "osc.json", tmp_path / "osc.csv"
    rc = main(
        ["solve", "--potential", "-sqrt(m/2)*omega*x", "--param", "omega=1", "--levels", "4", "--json", str(js), "--csv", str(cs)]
        + SMALL
    )
    assert rc == 0
    report = json.loads(js.read_text())
    degs = [lv["degeneracy"] for lv in report["spectrum"]["levels"]]
    assert degs[:4] == [2, 4, 4, 4]
    assert report["zero_modes"]["classification"] == "H00+H11"
    src = "-sqrt(m/2)*omega*x"
    assert report["config"]["potential_sha256"] == hashlib.sha256(src.encode()).hexdigest()
    assert report["config"]["params"] == {"omega": 1.0}
    rows = list(csv.reader(cs.open(newline="")))
    assert rows[0] == ["config_json"]
    assert rows[2] == ["index", "energy", "level", "sector"]
    assert len(rows) == 3 + 16


def test_solve_broken_susy(tmp_path):
    js = tmp_path / "x2.json"
    assert main(["solve", "--potential", "x^2", "--levels", "3", "--json", str(js)] + SMALL) == 0
    report = json.loads(js.read_text())
    assert report["zero_modes"]["classification"] == "broken"
    assert report["positivity"]["min_energy"] > 0


def test_solve_is_deterministic(tmp_path):
    path = tmp_path / "run.json"
    runs = []
    for _ in range(2):
        main(["solve", "--potential", "x + 0.3*x^3", "--levels", "3", "--json", str(path)] + SMALL)
        runs.append(path.read_bytes())
    assert runs[0] == runs[1]


def test_solve_syntax_error(capsys):
    assert main(["solve", "--potential", "x +"]) == 3
    err = capsys.readouterr().err
    assert "x +\n   ^" in err


def test_solve_unknown_function(capsys):
    assert main(["solve", "--potential", "abs(x)"]) == 3


def test_solve_domain_error(capsys):
    assert main(["solve", "--potential", "1/x", "--n", "513"]) == 4
    assert main(["solve", "--potential", "sqrt(x)"]) == 4


def test_solve_bad_param(capsys):
    assert main(["solve", "--potential", "x", "--param", "omega"]) == 2
    assert main(["solve", "--potential", "x", "--param", "omega=-1"]) == 2


def test_oscillator_defaults(tmp_path, capsys):
    js = tmp_path / "osc.json"
    assert main(["oscillator", "--json", str(js)]) == 0
    report = json.loads(js.read_text())
    assert report["passed"]
    assert max(r["error"] for r in report["levels"]) <= 1e-2
    assert [r["degeneracy"] for r in report["levels"]] == [2, 4, 4, 4, 4, 4, 4, 4]


def test_oscillator_omega_two(capsys):
    assert main(["oscillator", "--omega", "2"]) == 0
    out = capsys.readouterr().out
    assert "E=1.9999" in out and "E=3.999" in out


def test_oscillator_rejects_negative_omega(capsys):
    assert main(["oscillator", "--omega", "-1"]) != 0
    assert "omega must be positive" in capsys.readouterr().err


def test_oscillator_tolerance_violation(capsys):
    assert main(["oscillator", "--n", "128", "--tol", "1e-6"]) == 1
    assert "FAILED" in capsys.readouterr().err


@pytest.mark.parametrize("level", [1, 2, 3])
def test_multiplet_command(tmp_path, level, capsys):
    js = tmp_path / "mu.json"
    assert main(["multiplet", "--level", str(level), "--json", str(js)]) == 0
    report = json.loads(js.read_text())
    assert report["multiplet"]["dimension"] == 4
    assert report["multiplet"]["member_sectors"] == {
        "reference": "00",
        "Q01": "01",
        "Q10": "10",
        "Q10Q01": "11",
    }


def test_console_script_help():
    res = subprocess.run(
        [sys.executable, "-m", "z22susy.cli", "--help"], capture_output=True, text=True, check=True
    )
    for sub in ("verify", "solve", "oscillator", "multiplet"):
        assert sub in res.stdout
    assert "inject" not in res.stdout
