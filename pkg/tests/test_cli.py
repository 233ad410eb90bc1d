import json
import subprocess
import sys
from pathlib import Path

import pytest

from ncsmooth.cli import main

DATA = Path(__file__).resolve().parent.parent / "data"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr().out


def test_check_e2(capsys):
    code, out = run(capsys, "check", DATA / "e2.json")
    assert code == 0
    assert out.splitlines()[0] == "solvable: yes, triangular: no, witness e1"


def test_check_json(capsys):
    code, out = run(capsys, "check", "af1", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["triangular"] is True and doc["solvable"] is True


def test_mul(capsys):
    assert run(capsys, "mul", DATA / "af1.json", "e2*e1") == (0, "e1*e2 - e2\n")
    code, out = run(capsys, "mul", "heisenberg", "e2*e1", "--format", "json")
    terms = {tuple(t["exp"]): t["c"] for t in json.loads(out)["terms"]}
    assert terms == {(1, 1, 0): "1", (0, 0, 1): "-1"}


def test_mul_truncation(capsys):
    code, out = run(capsys, "mul", "heisenberg", "e2*e1", "--n-trunc", "0")
    assert code == 0 and out.strip() == "e1*e2"


def test_rep_symbol(capsys):
    code, out = run(capsys, "rep", "af1", "e1+e2", "--beta", "1")
    assert code == 0
    assert out.splitlines()[1:] == ["(1,1): l1 + 1", "(1,2): 1", "(2,2): l1"]


def test_adapt(capsys):
    code, out = run(capsys, "adapt", "heisenberg")
    assert code == 0 and "mu = (0, 0, 0)" in out


def test_dominate(capsys):
    code, out = run(capsys, "dominate", "af1", "e1*e2", "--box", "0:1", "--beta", "1")
    assert code == 0 and out.strip().endswith("PASS")
    code, out = run(capsys, "dominate", "heisenberg", "--seed", "3", "--count", "2", "--box", "-1:1,-1:1",
                    "--format", "json")
    assert code == 0 and json.loads(out)["all_pass"]


def test_seminorm(capsys):
    code, out = run(capsys, "seminorm", "af1", "e1*e2^2", "--box", "0:2", "--beta", "2")
    assert code == 0 and out.strip() == "beta=[2]: 2"


def test_growth_and_resolvent(capsys):
    code, out = run(capsys, "growth", "--input", DATA / "jordan3.json", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["verdict"] == "polynomial" and abs(doc["alpha"] - 2) < 0.2
    code, out = run(capsys, "growth", "--matrix", "[[0,-1],[1,0]]", "--format", "csv", "--s-max", "100")
    assert out.splitlines()[0] == "s,norm"
    code, out = run(capsys, "resolvent", "--matrix", "[[0,1],[0,0]]", "--format", "json")
    assert abs(json.loads(out)["gamma_near"] - 2) < 0.01


def test_fc(capsys):
    code, out = run(capsys, "fc", "--matrix", "[[0,1,0],[0,0,1],[0,0,0]]", "--method", "taylor", "--gaussian", "0")
    assert code == 0 and out.splitlines() == ["[1, 0, -0.5]", "[0, 1, 0]", "[0, 0, 1]"]
    code, out = run(capsys, "fc", "--matrix", "[[0,0],[0,1]]", "--gaussian", "0")
    assert out.splitlines() == ["[1, 0]", "[0, 0.6065306597]"]


def test_sheaf(capsys):
    code, out = run(capsys, "sheaf", "--input", DATA / "cover_heisenberg.json")
    assert code == 0 and out.startswith("glued on (0,3) x (0,1) (exact)")
    code, out = run(capsys, "sheaf", "--input", DATA / "cover_mismatch.json", "--format", "json")
    doc = json.loads(out)
    assert code == 1 and doc["error"] == "mismatch" and doc["beta"] == [2]


def test_demo(capsys):
    code, out = run(capsys, "demo-e2", "--m", "2", "--degrees", "12,120", "--format", "json")
    rows = json.loads(out)
    assert code == 0 and [r["fit_ok"] for r in rows] == [False, True]


@pytest.mark.parametrize("argv,kind", [
    (["check", "nosuch"], "unknown_name"),
    (["mul", "af1", "e1^"], "parse_error"),
    (["mul", "af1"], "usage"),
    (["check", "af1", "--bogus"], "usage"),
    (["growth", "--matrix", "[[0,1],[0,0]]", "--nodes", "8"], "usage"),
    (["fc", "--matrix", "[[0,-1],[1,0]]", "--gaussian", "0"], None),
])
def test_errors_are_json(capsys, argv, kind):
    code, out = run(capsys, *argv)
    doc = json.loads(out)
    assert code == 2 and "error" in doc and "message" in doc
    if kind:
        assert doc["error"] == kind


def test_malformed_files(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, out = run(capsys, "check", bad)
    assert code == 2 and json.loads(out)["error"] == "parse_error"
    jac = tmp_path / "jacobi.json"
    jac.write_text(json.dumps({"dim": 3, "brackets": [{"i": 1, "j": 2, "c": {"3": "1"}},
                                                      {"i": 1, "j": 3, "c": {"3": "1"}},
                                                      {"i": 2, "j": 3, "c": {"1": "1"}}]}))
    code, out = run(capsys, "check", jac)
    assert code == 2 and json.loads(out)["error"] == "jacobi_violation"
    code, out = run(capsys, "sheaf", "--input", tmp_path / "missing.json")
    assert code == 2


def test_byte_identical_reruns():
    argv = [sys.executable, "-m", "ncsmooth", "dominate", "heisenberg", "--seed", "7", "--count", "3",
            "--box", "0:1,0:1", "--format", "json"]
    a = subprocess.run(argv, capture_output=True, check=True).stdout
    b = subprocess.run(argv, capture_output=True, check=True).stdout
    assert a == b and a
