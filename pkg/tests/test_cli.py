import csv
import json
import math

import pytest

from spinfactor.cli import InputError, main, parse_state


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--reproducible")
    return code, json.loads(out)


def test_div_examples(capsys):
    code, out = run_json(capsys, "div", "--gen", "shannon", "--rho", "pure:e1", "--sigma", "center")
    assert code == 0 and out["D_F"] == 0.6931471805599453
    code, out = run_json(capsys, "div", "--gen", "quadratic", "--rho", "center", "--sigma", "center")
    assert out["D_F"] == 0.0 and out["D^F"] == 0.0
    code, out = run_json(capsys, "div", "--gen", "shannon", "--rho", "center", "--sigma", "pure:e1")
    assert code == 0 and out["D_F"] == "inf"


def test_div_rejects_malformed_input(capsys):
    code, out, err = run(capsys, "div", "--gen", "shannon", "--rho", "v:[0.9,0.9]", "--sigma", "center")
    assert code == 2 and out == "" and "error" in err
    code, out, err = run(capsys, "div", "--gen", "nonsense", "--rho", "center", "--sigma", "center")
    assert code == 2 and out == ""
    code, out, err = run(capsys, "div", "--gen", "shannon", "--rho", "pure:e0", "--sigma", "center")
    assert code == 2


def test_state_grammar():
    assert parse_state("center", 3).allclose(parse_state("v:[0,0,0]", 3), 0)
    assert parse_state("pure:e2", 3).v.tolist() == [0.0, 0.5, 0.0]
    assert parse_state('{"v": [0.1, 0.2], "s": 0.5}', 2).v.tolist() == [0.1, 0.2]
    with pytest.raises(InputError):
        parse_state("v:[0.5,0.5]", 2)


def test_critical_alpha(capsys, tmp_path):
    code, out = run_json(capsys, "critical-alpha")
    assert code == 0 and abs(out["alpha_star"] - 6.43779) <= 1e-3 and out["residual"] <= 1e-10
    code, out = run_json(capsys, "critical-alpha", "--tol", "1e-12")
    assert out["residual"] <= 1e-12
    path = tmp_path / "curve.csv"
    code, out = run_json(capsys, "critical-alpha", "--emit-curve", str(path))
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["alpha", "g"] and len(rows) == 501
    assert float(rows[1][0]) == 3.0 and float(rows[1][1]) == 2.0 and float(rows[-1][0]) == 8.0


def test_monotone_examples(capsys, tmp_path):
    code, out = run_json(capsys, "monotone", "--gen", "quadratic", "--d", "5", "--trials", "300")
    assert code == 0 and out["violations"] == 0
    path = tmp_path / "w.csv"
    code, out = run_json(
        capsys, "monotone", "--gen", "tsallis:2.5", "--d", "1", "--dilations-only", "--expect-violations",
        "--trials", "2000", "--csv", str(path),
    )
    assert code == 0 and out["violations"] >= 1
    assert 1 <= len(out["witnesses"]) <= 10
    rows = list(csv.DictReader(path.open()))
    assert len(rows) == out["violations"]
    assert all(float(r["excess"]) > 1e-9 for r in rows)


def test_monotone_exit_codes(capsys):
    code, _ = run_json(capsys, "monotone", "--gen", "shannon", "--d", "2", "--trials", "50", "--expect-violations")
    assert code == 3
    code, _ = run_json(capsys, "monotone", "--gen", "tsallis:2.5", "--d", "1", "--trials", "2000", "--dilations-only")
    assert code == 3


def test_seed_from_environment(capsys, monkeypatch):
    args = ("monotone", "--gen", "tsallis:2.5", "--d", "1", "--trials", "500", "--dilations-only")
    _, a = run_json(capsys, *args, "--seed", "5")
    monkeypatch.setenv("SPINFACTOR_SEED", "5")
    _, b = run_json(capsys, *args)
    assert a == b
    monkeypatch.setenv("SPINFACTOR_SEED", "-1")
    code, _, _ = run(capsys, *args)
    assert code == 2


def test_output_is_byte_identical_when_reproducible(capsys):
    args = ("monotone", "--gen", "shannon", "--d", "3", "--trials", "200", "--seed", "7", "--reproducible")
    _, first, _ = run(capsys, *args)
    _, second, _ = run(capsys, *args)
    assert first == second
    _, stamped, _ = run(capsys, *args[:-1])
    assert "timestamp" in json.loads(stamped) and "timestamp" not in json.loads(first)


def test_capacity_examples(capsys, tmp_path):
    code, out = run_json(capsys, "capacity", "--gen", "shannon", "--ball", "--d", "3")
    assert code == 0 and out["value"] == 0.6931471805599453 and out["optimizer"] == "center"
    code, out = run_json(capsys, "capacity", "--gen", "quadratic", "--ball", "--d", "2")
    assert out["value"] == 0.5
    path = tmp_path / "antipodal.json"
    path.write_text(json.dumps(["pure:e1", {"v": [-0.5, 0.0], "s": 0.5}]))
    code, out = run_json(capsys, "capacity", "--gen", "shannon", "--states", str(path))
    assert code == 0 and abs(out["value"] - math.log(2)) <= 1e-7
    for key in ("weights", "gap", "iterations", "converged", "optimizer"):
        assert key in out


def test_capacity_nonconvergence_and_bad_file(capsys, tmp_path):
    path = tmp_path / "s.json"
    path.write_text(json.dumps(["v:[0.3,0.1]", "v:[-0.2,0.4]", "v:[0.0,-0.45]"]))
    code, out = run_json(capsys, "capacity", "--gen", "shannon", "--states", str(path), "--max-iter", "0", "--tol", "1e-15")
    assert code == 4 and out["converged"] is False and out["gap"] > 0
    bad = tmp_path / "bad.json"
    bad.write_text("not json")
    code, out, err = run(capsys, "capacity", "--gen", "shannon", "--states", str(bad))
    assert code == 2 and out == ""


def test_verify_suites(capsys):
    code, out, _ = run(capsys, "verify", "algebra")
    assert code == 0 and "(v,1)" in out and "FAIL" not in out
    code, out, _ = run(capsys, "verify", "recovery", "--seed", "1")
    assert code == 0 and "Psi" in out


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as info:
        main(["verify", "nope"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main(["monotone", "--gen", "shannon", "--seed", "-3"])
    assert info.value.code == 2
