import json

import pytest

from triharmonic.cli import main

GRID = '{"min": [-1, -1, -1], "max": [1, 1, 1], "n": 5}'


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_algebra_check_cyclic(capsys):
    code, out, _ = run(capsys, "algebra", "check", "paper:cyclic-params")
    assert code == 0
    assert "p7=0 p8=1 p9=0" in out
    assert "associative: yes" in out
    assert "representation homomorphism: yes" in out


def test_algebra_check_json_output(capsys, tmp_path):
    f = tmp_path / "p.json"
    f.write_text('{"p": ["1/2", 0, 1, 0, 0, 0]}')
    code, out, _ = run(capsys, "algebra", "check", str(f), "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["associative"] is True


def test_algebra_check_truncated_input(capsys, tmp_path):
    f = tmp_path / "bad.json"
    f.write_text('{"p": [0, 1,')
    code, _, err = run(capsys, "algebra", "check", str(f))
    assert code == 1
    assert "error" in err


def test_usage_errors_exit_one(capsys):
    assert run(capsys, "phi")[0] == 1
    assert run(capsys, "algebra", "check")[0] == 1
    assert run(capsys, "phi", "solve", "--matrix", "paper:eqA-matrix",
               "--params", "paper:cyclic-params")[0] == 1


def test_phi_solve_standard_map(capsys):
    code, out, _ = run(capsys, "phi", "solve", "--matrix", "paper:eqA-matrix", "--restarts", "5", "--seed", "1")
    assert code == 0
    cands = json.loads(out)
    assert cands and all(c["residual"] < 1e-10 for c in cands)


def test_phi_solve_identity_has_no_solution(capsys):
    code, _, err = run(capsys, "phi", "solve", "--matrix", '{"A": [[1,0,0],[0,1,0],[0,0,1]]}',
                       "--restarts", "10")
    assert code == 3
    assert "no solution" in err


def test_phi_verify(capsys):
    code, out, _ = run(capsys, "phi", "verify", "--matrix", "paper:eqA-matrix", "--params", "paper:cyclic-params")
    assert code == 0
    assert "harmonicity residual: (0, 0, 0) pass" in out
    code, _, _ = run(capsys, "phi", "verify", "--matrix", '{"A": [[1,0,0],[0,1,0],[0,0,1]]}',
                     "--params", "paper:cyclic-params")
    assert code == 2


def test_field_verify_phi_squared(capsys):
    code, out, _ = run(capsys, "field", "verify", "paper:phi2", "--laplacian", "--div", "--cr")
    assert code == 0
    assert "-4*x + 4*y + 8*z" in out
    assert out.strip().endswith("result: pass")


def test_field_verify_lamellar_example(capsys):
    code, out, _ = run(capsys, "field", "verify", "paper:V-of-phi2", "--laplacian", "--div", "--curl",
                       "--first-integral", "1,-1,1")
    assert code == 0


def test_field_verify_expect_lamellar_fails_on_phi_squared(capsys):
    code, out, _ = run(capsys, "field", "verify", "paper:phi2", "--div", "--expect-lamellar")
    assert code == 2
    assert "result: fail" in out


def test_field_verify_cr_failure_names_row(capsys):
    doc = '{"kind": "polyfield", "components": [[[1, 0, 0, 1]], [], []]}'
    code, out, _ = run(capsys, "field", "verify", doc, "--cr")
    assert code == 2
    assert "r1" in out


def test_field_verify_exp_numeric(capsys):
    code, out, _ = run(capsys, "field", "verify", '{"kind": "exp"}', "--cr", "--laplacian")
    assert code == 0


def test_field_gen_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        code, _, _ = run(capsys, "field", "gen", "--kind", "sin", "--grid", GRID, "--stencils", "--out", str(path))
        assert code == 0
    assert a.read_bytes() == b.read_bytes()
    header = a.read_text().splitlines()[0]
    assert header.startswith("x,y,z,F1,F2,F3")
    assert len(a.read_text().splitlines()) == 1 + 125


def test_field_gen_then_verify_round_trip(capsys, tmp_path):
    path = tmp_path / "t.csv"
    _, _, err = run(capsys, "field", "gen", "--function", '{"kind": "poly", "coeffs": [[0,0,0],[0,0,0],[1,0,0]]}',
                    "--lamellar", "--grid", GRID, "--stencils", "--out", str(path))
    assert "max|div|" in err
    code, out, _ = run(capsys, "field", "verify", str(path), "--div", "--curl", "--laplacian")
    assert code == 0


def test_field_gen_singular_rows(capsys):
    fn = '{"kind": "rational", "num": [[1,0,0]], "den": [[0,0,0],[1,0,0]]}'
    code, out, err = run(capsys, "field", "gen", "--function", fn, "--grid", GRID)
    assert code == 0
    assert "singular" in err
    assert "nan" in out


def test_field_gen_empty_grid(capsys):
    code, _, err = run(capsys, "field", "gen", "--kind", "exp",
                       "--grid", '{"min": [0,0,0], "max": [1,1,1], "n": [0,1,1]}')
    assert code == 1


@pytest.mark.parametrize("fmt", ["json", "text"])
def test_field_verify_formats(capsys, fmt):
    code, out, _ = run(capsys, "field", "verify", "paper:phi2", "--laplacian", "--format", fmt)
    assert code == 0
    if fmt == "json":
        assert json.loads(out)["passed"] is True
