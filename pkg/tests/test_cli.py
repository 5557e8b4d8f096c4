import json
import subprocess
import sys

import numpy as np
import pytest

from pumpkit.cli import main
from pumpkit.dataset import Dataset, dump_dataset, fixture_path, load_dataset


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze_json(capsys):
    code, out, _ = run(capsys, "analyze", fixture_path("fig1a"), "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["tmp"] == 2.0 and doc["garp"] is False
    assert doc["a_tilde"] == 0.2


def test_analyze_plain(capsys):
    code, out, _ = run(capsys, "analyze", fixture_path("fig1b"))
    assert code == 0
    assert "TMP = A = Q            2.000000" in out
    assert "TMP_c = A_c = Q_c      0.000000" in out


def test_analyze_input_flag_and_out(capsys, tmp_path):
    dest = tmp_path / "r.json"
    code, out, _ = run(capsys, "analyze", "-i", fixture_path("example2"), "--json", "--out", dest)
    assert code == 0 and out == ""
    assert json.loads(dest.read_text())["scsd_max"] == 5.0


def test_analyze_json_is_byte_identical(capsys):
    _, first, _ = run(capsys, "analyze", fixture_path("example1"), "--json")
    _, second, _ = run(capsys, "analyze", fixture_path("example1"), "--json")
    assert first == second


def test_analyze_missing_file(capsys):
    code, _, err = run(capsys, "analyze", "missing.csv")
    assert code == 2 and "not found" in err


def test_analyze_invalid_data(capsys, tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("0,1,1,1\n")
    assert run(capsys, "analyze", bad)[0] == 2


def test_bad_tolerance_env(capsys, monkeypatch):
    monkeypatch.setenv("PUMPKIT_TOL", "-1")
    assert run(capsys, "analyze", fixture_path("fig1a"))[0] == 2


def test_tolerance_env_changes_ties(capsys, monkeypatch, tmp_path):
    # p^1 . x^2 exceeds p^1 . x^1 by 1e-6: unaffordable at the default band,
    # affordable at a wide one, which closes a violating cycle
    path = tmp_path / "near.csv"
    path.write_text("1,1,1,1\n3,1,2,0.000001\n")
    _, out, _ = run(capsys, "analyze", path, "--json")
    default = json.loads(out)
    monkeypatch.setenv("PUMPKIT_TOL", "1e-3")
    _, out, _ = run(capsys, "analyze", path, "--json")
    wide = json.loads(out)
    assert default["garp"] is True and wide["garp"] is False


def test_rationalize_constrained(capsys, tmp_path):
    dest = tmp_path / "u.json"
    code, out, _ = run(capsys, "rationalize", fixture_path("fig1b"), "--constrained", "--out", dest)
    assert code == 0
    doc = json.loads(dest.read_text())
    assert doc["kind"] == "budget_constrained" and doc["certificate"]["pass"] is True
    assert "PASS" in out


def test_rationalize_precondition_names_witness(capsys):
    code, out, err = run(capsys, "rationalize", fixture_path("fig1a"))
    assert code == 4
    assert "witness cycle 1,2" in err and out == ""


def test_rationalize_optimal_permutation(capsys):
    code, out, _ = run(capsys, "rationalize", fixture_path("example2"), "--optimal-permutation", "--constrained")
    assert code == 0
    doc = json.loads(out)
    assert doc["gap"] == pytest.approx(8.0) and doc["permutation"] == [2, 1, 4, 3]


def test_generate_then_analyze(capsys, tmp_path):
    ql = tmp_path / "ql.csv"
    assert run(capsys, "generate", "--model", "quasilinear", "--T", 6, "--L", 3, "--seed", 7, "--out", ql)[0] == 0
    _, out, _ = run(capsys, "analyze", ql, "--json")
    assert json.loads(out)["tmp"] <= 1e-7
    assert run(capsys, "rationalize", ql)[0] == 0

    cd = tmp_path / "cd.json"
    assert run(capsys, "generate", "--model", "cobb-douglas", "--T", 5, "--L", 2, "--seed", 1, "--out", cd)[0] == 0
    assert load_dataset(cd).T == 5
    _, out, _ = run(capsys, "analyze", cd, "--json")
    assert json.loads(out)["tmp_c"] <= 1e-7


def test_generate_is_reproducible(capsys):
    _, a, _ = run(capsys, "generate", "--T", 4, "--L", 2, "--seed", 3)
    _, b, _ = run(capsys, "generate", "--T", 4, "--L", 2, "--seed", 3)
    assert a == b and a.count("\n") == 5


def test_generate_bad_parameters(capsys):
    assert run(capsys, "generate", "--T", 0)[0] == 2
    assert run(capsys, "generate", "--T", 3, "--L", 0)[0] == 2


@pytest.mark.parametrize("name", ["fig1a", "example2"])
def test_oracle_agrees(capsys, name):
    code, out, _ = run(capsys, "oracle", fixture_path(name))
    assert code == 0
    last = out.strip().splitlines()[-1]
    assert last.endswith("(ok)")
    assert float(last.split()[2]) <= 1e-9
    if name == "example2":
        assert "TMP_c     8.000000000" in out


def test_oracle_guard(capsys, tmp_path):
    rng = np.random.default_rng(0)
    big = tmp_path / "big25.csv"
    big.write_text(dump_dataset(Dataset(rng.uniform(1, 2, (25, 2)), rng.uniform(1, 2, (25, 2)))))
    assert run(capsys, "oracle", big)[0] == 2


def test_pump_and_lp(capsys):
    code, out, _ = run(capsys, "pump", fixture_path("example2"), "--json")
    assert code == 0 and json.loads(out)["permutation"] == [2, 1, 4, 3]
    code, out, _ = run(capsys, "lp", fixture_path("fig1b"), "--constrained")
    assert code == 0 and out.startswith("epsilon_bar_c = 0.000000")


def test_no_input(capsys):
    assert run(capsys, "pump")[0] == 2


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "pumpkit", "pump", str(fixture_path("fig1a"))],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("TMP = 2.000000")
