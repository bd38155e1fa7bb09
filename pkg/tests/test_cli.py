from __future__ import annotations

import json
import subprocess
import sys

import pytest

from plie.algebra import BracketAlgebra, named_algebra
from plie.bockstein import B2Report
from plie.cli import run
from plie.modp import PrimePower


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def non_lie_file(tmp_path):
    L = BracketAlgebra.from_brackets(PrimePower(5), 3, {(0, 1): [0, 0, 1], (0, 2): [1, 0, 0]})
    path = tmp_path / "bad.json"
    path.write_text(L.to_json())
    return str(path)


def test_check_lie(capsys):
    code, out, _ = call(capsys, "check-lie", "--named", "sl2", "-p", "5")
    assert code == 0 and out.strip() == "Lie: yes (Jacobi ≡ 0)"


def test_check_lie_non_lie(capsys, non_lie_file):
    code, out, _ = call(capsys, "check-lie", "--file", non_lie_file)
    assert code == 0 and out.startswith("Lie: no")
    code, out, _ = call(capsys, "check-lie", "--file", non_lie_file, "--json")
    assert json.loads(out)["jacobi"] == {"0,1,2": [0, 0, 4]}


def test_b2_table(capsys):
    code, out, err = call(capsys, "b2", "--named", "sl2", "-p", "5", "-D", "6")
    assert code == 0 and not err
    rows = {int(line.split()[0]): line.split() for line in out.splitlines()[2:]}
    assert rows[3][2] == "1" and rows[4][2] == "1"
    assert rows[3][3] == "1" and rows[4][3] == "1"
    assert "differs" not in out


def test_b2_json_round_trips(capsys):
    code, out, _ = call(capsys, "b2", "--named", "solvable_S", "-D", "8", "--json")
    rep = B2Report.from_dict(json.loads(out))
    assert code == 0 and rep.to_json() == json.dumps(json.loads(out), sort_keys=True)


def test_b2_p3_banner_and_flags(capsys):
    code, out, err = call(capsys, "b2", "--named", "sl2", "-p", "3", "-D", "8")
    assert code == 0 and "warning" in err
    assert "*" in out and "differs" in out


def test_b2_with_eta_file(capsys, tmp_path):
    path = tmp_path / "eta.json"
    path.write_text(json.dumps([{}, {}, {"0,1,2": 1}]))
    code, out, _ = call(capsys, "b2", "--named", "heisenberg", "--eta", str(path), "-D", "5")
    assert code == 0
    path.write_text(json.dumps([{"0,1": 1}, {}, {}]))
    code, _, err = call(capsys, "b2", "--named", "heisenberg", "--eta", str(path), "-D", "5")
    assert code == 2 and "malformed eta" in err


def test_b2_of_non_lie_is_a_computation_error(capsys, non_lie_file):
    code, _, err = call(capsys, "b2", "--file", non_lie_file, "-D", "5")
    assert code == 1 and "computation failed" in err


def test_cohomology(capsys):
    code, out, _ = call(capsys, "cohomology", "--named", "sl2", "--coeff", "sym:2", "--json")
    assert code == 0 and json.loads(out)["dims"] == [1, 0, 0, 1]
    code, _, err = call(capsys, "cohomology", "--named", "sl2", "--coeff", "sym:x")
    assert code == 2


def test_gamma(capsys):
    code, out, _ = call(capsys, "gamma", "-n", "2", "-k", "2", "-p", "3", "--verify")
    assert code == 0
    assert "order 6561" in out and "powerful: yes" in out and "p-central: yes" in out
    assert "Log ≅ gl2(F_3): yes" in out


def test_exp_verify(capsys):
    code, out, _ = call(capsys, "exp", "--named", "heisenberg", "-p", "3", "--verify", "--json")
    data = json.loads(out)
    assert code == 0 and data["order"] == 729 and data["exponent"] == 9
    assert data["log_roundtrip"] and data["omega_power_frattini"]


def test_budget_from_env(capsys, monkeypatch):
    monkeypatch.setenv("PLIE_BUDGET", "10")
    code, _, err = call(capsys, "exp", "--named", "sl2", "-p", "3", "--verify")
    # predicates fall back to sampling, but the Log round trip needs enumeration
    assert code == 2 and "budget exceeded" in err


def test_lift(capsys):
    code, out, _ = call(capsys, "lift", "--named", "gl2", "-p", "3", "-k", "2", "--json")
    data = json.loads(out)
    assert code == 0 and data["obstruction_zero"] and not any(data["mu"])
    assert BracketAlgebra.from_dict(data["corrected"]).is_lie()


def test_lift_rejects_non_lie(capsys, tmp_path):
    L = BracketAlgebra.from_brackets(PrimePower(3), 3, {(0, 1): [0, 0, 1], (0, 2): [1, 0, 0]})
    path = tmp_path / "bad.json"
    path.write_text(L.to_json())
    code, _, err = call(capsys, "lift", "--file", str(path))
    assert code == 2 and "J(L)" in err


def test_e3(capsys, non_lie_file):
    code, out, _ = call(capsys, "e3", "--file", non_lie_file, "--json")
    data = json.loads(out)
    assert code == 0 and data["match"] and len(data["e3"]) == 6


def test_report_is_byte_stable(capsys):
    first = call(capsys, "report", "--named", "so3", "-D", "6", "--json")
    second = call(capsys, "report", "--named", "so3", "-D", "6", "--json")
    assert first == second and first[0] == 0
    data = json.loads(first[1])
    assert data["tower"] == "extends to length 4"
    assert BracketAlgebra.from_dict(data["algebra"]) == named_algebra("so3", 5)


@pytest.mark.parametrize("argv", [
    ["check-lie", "--named", "sl2", "-p", "4"],
    ["check-lie", "--named", "sl2", "-p", "2"],
    ["b2", "--named", "sl2", "-D", "1"],
    ["check-lie"],
    ["check-lie", "--named", "nosuch"],
    ["gamma", "-p", "3"],
    ["frobnicate"],
    ["check-lie", "--file", "/nonexistent/algebra.json"],
])
def test_validation_errors_exit_2(capsys, argv):
    code, _, err = call(capsys, *argv)
    assert code == 2 and err


def test_distinct_messages_for_file_errors(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    _, _, missing = call(capsys, "check-lie", "--file", str(tmp_path / "missing.json"))
    _, _, malformed = call(capsys, "check-lie", "--file", str(bad))
    assert "cannot read" in missing and "malformed" in malformed


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "plie", "check-lie", "--named", "heisenberg"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "Lie: yes" in proc.stdout
