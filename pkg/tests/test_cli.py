import json

import numpy as np
import pytest

from carlab import affine as af
from carlab import covariance as cv
from carlab import golden
from carlab.cli import main
from carlab.numerics import dump_matrix, load_matrix


@pytest.fixture
def files(tmp_path):
    s, s2, gamma = golden.operators()
    paths = {"S": tmp_path / "S.json", "S2": tmp_path / "S2.json", "G": tmp_path / "G.json"}
    dump_matrix(s.S, paths["S"])
    dump_matrix(s2.S, paths["S2"])
    paths["G"].write_text(json.dumps(gamma.to_json()))
    return {k: str(v) for k, v in paths.items()}


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_validate_example(files, capsys):
    code, out, _ = run(["validate", files["S"], "--gamma", files["G"]], capsys)
    assert code == 0 and "valid: True" in out


def test_validate_identity_fails(tmp_path, capsys):
    p = tmp_path / "I.json"
    dump_matrix(np.eye(2), p)
    code, out, _ = run(["validate", str(p)], capsys)
    assert code == 1
    assert "Gamma S Gamma = 1 - S" in out and "FAIL" in out


def test_validate_json_output(tmp_path, capsys):
    p = tmp_path / "I.json"
    dump_matrix(np.eye(2), p)
    code, out, _ = run(["validate", str(p), "--format", "json"], capsys)
    payload = json.loads(out)
    assert code == 1 and payload["violated"] == ["gamma_relation"]
    assert payload["residuals"]["gamma_relation"] == pytest.approx(1.0)


def test_validate_malformed_json(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text('{"rows": 2, "cols": ')
    code, _, err = run(["validate", str(p)], capsys)
    assert code == 2 and "line 1 column" in err


def test_validate_nan_entry(tmp_path, capsys):
    p = tmp_path / "nan.json"
    p.write_text('{"rows": 1, "cols": 1, "entries": [[NaN, 0]]}')
    code, _, err = run(["validate", str(p)], capsys)
    assert code == 2 and "finite" in err


def test_affine_example_pair(files, capsys):
    code, out, _ = run(["affine", files["S"], files["S2"], "--gamma", files["G"], "--format", "json"], capsys)
    payload = json.loads(out)
    assert payload["method"] == "numeric" and payload["commuting"] is False
    assert payload["diff_rank"] == 2 and payload["necessary_check"] is True
    assert payload["verdict"] == "affine" and code == 0


def test_affine_identical_files(files, capsys):
    code, out, _ = run(["affine", files["S"], files["S"], "--gamma", files["G"]], capsys)
    assert code == 0 and "verdict: affine" in out


def test_affine_commuting_one_index(tmp_path, capsys):
    g = cv.swap_involution(4)
    frame = cv.adapted_diagonalize(cv.random_covariance(4, g, 0.9, 3))
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    dump_matrix(cv.covariance_from_basis(frame, [0.9, 0.6]).S, a)
    dump_matrix(cv.covariance_from_basis(frame, [0.3, 0.6]).S, b)
    code, out, _ = run(["affine", str(a), str(b)], capsys)
    assert code == 0 and "method: analytic" in out and "verdict: affine" in out


def test_affine_commuting_two_indices_report_round_trips(tmp_path, capsys):
    g = cv.swap_involution(4)
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    dump_matrix(np.diag([0.9, 0.1, 0.6, 0.4]), a)
    dump_matrix(np.diag([0.3, 0.7, 0.2, 0.8]), b)
    code, out, _ = run(["affine", str(a), str(b), "--format", "json"], capsys)
    assert code == 1
    payload = json.loads(out)
    payload.pop("necessary_check")
    payload.pop("necessary_residual")
    rep = af.AffineReport.from_json(payload)
    assert rep.verdict == "not_affine" and rep.joint_alphas is not None


def test_affine_dimension_mismatch(files, tmp_path, capsys):
    p = tmp_path / "half.json"
    dump_matrix(0.5 * np.eye(2), p)
    code, _, err = run(["affine", files["S"], str(p)], capsys)
    assert code == 2 and "mismatch" in err


def test_affine_lambda_must_be_interior(files, capsys):
    code, _, _ = run(["affine", files["S"], files["S2"], "--gamma", files["G"], "--lambda", "1.0"], capsys)
    assert code == 2


def test_example38_output(capsys):
    code, out, _ = run(["example38", "--format", "json"], capsys)
    r = json.loads(out)
    assert r["values_match"] is True
    assert r["diff_rank"] == 2 and r["commutator_norm"] > 1e-6
    assert r["phi_own_basis"]["S"] == pytest.approx(-np.sqrt(3) / 3, abs=1e-12)
    # the report is not a pass: with b held fixed the pair is affine
    assert abs(r["fixed_basis_discrepancy"]) < 1e-12
    assert code == (0 if r["passed"] else 1)


def test_conjecture_k4(capsys):
    code, out, _ = run(["conjecture", "--dim", "4", "--trials", "500", "--seed", "7", "--format", "json"], capsys)
    r = json.loads(out)
    assert all(h["rank"] != 1 for h in r["histogram"])
    assert sum(h["count"] for h in r["histogram"]) == 1500
    assert code == (3 if r["flags"] else 0)


def test_conjecture_k2_all_affine(capsys):
    code, out, _ = run(["conjecture", "--dim", "2", "--trials", "100", "--format", "json"], capsys)
    r = json.loads(out)
    assert code == 0 and {h["verdict"] for h in r["histogram"]} == {"affine"}


def test_conjecture_byte_identical(tmp_path, capsys):
    outs = []
    for name in ("a.json", "b.json"):
        path = tmp_path / name
        code = main(["conjecture", "--dim", "5", "--trials", "10", "--seed", "11", "--format", "json", "--out", str(path)])
        assert code == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_conjecture_over_cap(capsys):
    code, _, err = run(["conjecture", "--dim", "8", "--trials", "1"], capsys)
    assert code == 2 and "cap" in err


def test_rep_dump(tmp_path, capsys):
    code, out, _ = run(["rep", "--dim", "2", "--parity", "odd", "--dump-dir", str(tmp_path)], capsys)
    assert code == 0 and "car_passed: True" in out
    z0 = load_matrix(tmp_path / "b_eps0.json")
    assert np.allclose(z0 @ z0, 0.5 * np.eye(8))


def test_usage_error(capsys):
    assert main(["nonsense"]) == 2
    assert main(["conjecture", "--dim", "3", "--trials", "0"]) == 2
