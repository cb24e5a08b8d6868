import json
import subprocess
import sys
from pathlib import Path

import pytest

from sysrisk.cli import main

SHIPPED = Path(__file__).resolve().parents[1] / "instances"


def run(capsys, *args):
    code = main([str(a) for a in args])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_rho_json(capsys):
    code, out, _ = run(capsys, "rho", "--instance", SHIPPED / "ex1.json", "--x", SHIPPED / "x1.json",
                       "--format", "json")
    rep = json.loads(out)
    assert code == 0
    assert rep["value"] == 1.0
    assert rep["gamma"] == 0.0
    assert rep["assumption_A"]["holds"] is True


def test_rho_defaults_to_zero_profile(capsys):
    code, out, _ = run(capsys, "rho", "--instance", SHIPPED / "ex_expectation.json", "--format", "json")
    rep = json.loads(out)
    assert rep["value"] == rep["gamma"]


def test_gamma_pointwise(capsys):
    code, out, _ = run(capsys, "gamma", "--instance", SHIPPED / "ex_pointwise.json", "--format", "json")
    assert code == 0 and json.loads(out)["value"] == 0.0


def test_arbitrage_exit_code(capsys):
    code, out, _ = run(capsys, "arbitrage", "--instance", SHIPPED / "ex_arb.json", "--format", "json")
    rep = json.loads(out)
    assert code == 1
    assert rep["certificate"]["verified"] is True
    assert rep["certificate"]["sum_m"] < rep["threshold"]
    code, _, _ = run(capsys, "arbitrage", "--instance", SHIPPED / "ex1.json")
    assert code == 0


def test_dual_and_fair(capsys):
    code, out, _ = run(capsys, "dual", "--instance", SHIPPED / "ex_hedge.json", "--x", SHIPPED / "x1.json",
                       "--format", "json")
    rep = json.loads(out)
    assert code == 0 and abs(rep["dual_value"] - rep["primal_value"]) <= 1e-9
    code, out, _ = run(capsys, "fair", "--instance", SHIPPED / "ex_hedge.json", "--format", "json")
    assert code == 0 and json.loads(out)["validated"] is True


def test_check_a(capsys):
    code, out, _ = run(capsys, "check-a", "--instance", SHIPPED / "ex_network.json", "--n-max", "4",
                       "--format", "json")
    rep = json.loads(out)
    assert code == 0 and len(rep["steps"]) == 4 and rep["holds"]


@pytest.mark.parametrize("path", sorted(SHIPPED.glob("ex*.json")), ids=lambda p: p.stem)
def test_verify_shipped(capsys, path):
    code, out, _ = run(capsys, "verify", "--instance", path)
    assert code == 0, out


def test_verify_gamma_variant(capsys):
    code, _, _ = run(capsys, "verify", "--instance", SHIPPED / "ex_gamma.json", "--variant", "rho_gamma")
    assert code == 0


def test_input_errors(capsys, tmp_path):
    code, out, err = run(capsys, "rho", "--instance", tmp_path / "none.json")
    assert code == 2 and "Traceback" not in err and out == ""
    code, _, err = run(capsys, "rho", "--instance", SHIPPED / "ex1.json", "--tol", "-1")
    assert code == 2
    code, _, _ = run(capsys, "rho-gamma", "--instance", SHIPPED / "ex1.json")
    assert code == 2
    code, _, _ = run(capsys, "check-a", "--instance", SHIPPED / "ex1.json", "--n-max", "0")
    assert code == 2


def test_json_is_byte_stable(capsys):
    args = ("fair", "--instance", SHIPPED / "ex_tree.json", "--format", "json", "--seed", "3")
    first = run(capsys, *args)[1]
    assert run(capsys, *args)[1] == first


def test_module_entry_point_and_env_tol():
    env = {"SYSRISK_TOL": "1e-5", "PATH": ""}
    res = subprocess.run([sys.executable, "-m", "sysrisk", "gamma", "--instance", str(SHIPPED / "ex1.json")],
                         capture_output=True, text=True, env=env)
    assert res.returncode == 0 and "gamma: 0.0" in res.stdout
    env["SYSRISK_TOL"] = "zero"
    res = subprocess.run([sys.executable, "-m", "sysrisk", "gamma", "--instance", str(SHIPPED / "ex1.json")],
                         capture_output=True, text=True, env=env)
    assert res.returncode == 2 and "SYSRISK_TOL" in res.stderr
