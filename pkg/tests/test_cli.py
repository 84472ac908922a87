import json
import math
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quasiherm.cli import main, parse_axis
from quasiherm.errors import InvalidGrid, ParseError
from quasiherm.fileio import read_operator, read_state, write_operator, write_state
from quasiherm.models import model_pt2


@pytest.fixture
def files(tmp_path):
    def make(a, b):
        H, P = model_pt2(a, b)
        hp, pp = tmp_path / f"H_{a}_{b}.json", tmp_path / "P.json"
        write_operator(hp, H, label=f"pt2 a={a} b={b}")
        write_operator(pp, P.P, label="exchange")
        return str(hp), str(pp)

    return make


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_analyze_unbroken(files, capsys):
    H, P = files(0.6, 1.0)
    code, out, _ = run(["analyze", H, P], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["verdict"] == "Unbroken"
    assert rep["status"] == "certified"
    cert = rep["certificates"]
    assert cert["theta_quasi_hermiticity_residual"] <= 1e-9
    assert cert["c_involutivity_residual"] <= 1e-9
    h_eigs = sorted(r["h_eigenvalue"] for r in rep["eigenvalues"])
    np.testing.assert_allclose(h_eigs, [-0.8, 0.8], atol=1e-12)
    assert rep["inputs"]["hamiltonian"]["sha256"]


def test_analyze_broken(files, capsys):
    H, P = files(1.0, 0.6)
    code, out, _ = run(["analyze", H, P], capsys)
    assert code == 2
    rep = json.loads(out)
    assert rep["verdict"] == "Broken"
    assert "theta_quasi_hermiticity_residual" not in rep["certificates"]


def test_analyze_malformed_json(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"dim": 2, "matrix": [[1, 2]')
    code, _, err = run(["analyze", str(bad)], capsys)
    assert code == 1
    assert "ParseError" in err and "byte offset" in err


def test_module_qualified_errors(tmp_path, capsys):
    H = tmp_path / "H.json"
    write_operator(H, [[1j, 1.0], [1.0, 1j]])
    P = tmp_path / "P.json"
    write_operator(P, [[0, 1], [1, 0]])
    code, _, err = run(["analyze", str(H), str(P)], capsys)
    assert code == 1
    assert "krein.PseudoHermiticityViolated" in err


def test_dimension_mismatch(tmp_path, files, capsys):
    H, _ = files(0.6, 1.0)
    P = tmp_path / "P3.json"
    write_operator(P, np.eye(3))
    code, _, err = run(["analyze", H, str(P)], capsys)
    assert code == 1 and "DimensionMismatch" in err


def test_usage_error_is_failure(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["analyze"])
    assert exc.value.code == 1


def read_csv(text):
    lines = text.splitlines()
    header = [l for l in lines if l.startswith("#")]
    body = [l for l in lines if not l.startswith("#")]
    cols = body[0].split(",")
    data = np.array([[float(x) for x in l.split(",")] for l in body[1:]])
    return header, cols, data


def test_evolve_hermitian(tmp_path, capsys):
    H = tmp_path / "H.json"
    write_operator(H, [[1.0, 0.5 - 0.2j], [0.5 + 0.2j, -0.3]])
    s = tmp_path / "s.json"
    write_state(s, [3.0, 4.0j])
    code, out, _ = run(["evolve", str(H), str(s), "--t-max", "5", "--steps", "50"], capsys)
    assert code == 0
    _, cols, data = read_csv(out)
    assert cols[:3] == ["t", "s_norm", "f_norm"]
    assert "re_energy" in cols
    assert len(data) == 51
    np.testing.assert_allclose(data[:, 1], 1.0, atol=1e-9)
    np.testing.assert_allclose(data[:, 2], data[:, 1], atol=1e-9)


@pytest.mark.parametrize("picture", ["schrodinger", "heisenberg"])
def test_evolve_cell(files, tmp_path, capsys, picture):
    H, P = files(0.6, 1.0)
    s = tmp_path / "s.json"
    write_state(s, [1.0, 0.0])
    code, out, _ = run(["evolve", H, str(s), "--pseudometric", P, "--t-max", "10", "--picture", picture], capsys)
    assert code == 0
    header, cols, data = read_csv(out)
    assert any("theta" in h for h in header)
    assert len(data) == 201
    assert np.abs(data[:, 1] - data[0, 1]).max() <= 1e-9
    assert np.ptp(data[:, 2]) > 1e-2
    # energy expectation is conserved and real
    e = data[:, cols.index("re_energy")]
    assert np.ptp(e) < 1e-9
    assert np.abs(data[:, cols.index("im_energy")]).max() < 1e-9


def test_pictures_give_same_table(files, tmp_path, capsys):
    H, P = files(0.6, 1.0)
    s = tmp_path / "s.json"
    write_state(s, [0.3, 1.0j])
    X = tmp_path / "X.json"
    write_operator(X, [[0.0, 1.0], [2.0, 0.5j]], label="x")
    base = ["evolve", H, str(s), "--pseudometric", P, "--t-max", "4", "--observable", str(X)]
    _, out_s, _ = run(base, capsys)
    _, out_h, _ = run(base + ["--picture", "heisenberg"], capsys)
    _, cols, ds = read_csv(out_s)
    _, _, dh = read_csv(out_h)
    assert "re_x" in cols
    np.testing.assert_allclose(ds[:, 3:], dh[:, 3:], atol=1e-9)


def test_evolve_broken_requires_force(files, tmp_path, capsys):
    H, P = files(1.0, 0.6)
    s = tmp_path / "s.json"
    write_state(s, [1.0, 0.0])
    code, out, err = run(["evolve", H, str(s), "--pseudometric", P, "--t-max", "5"], capsys)
    assert code == 2 and out == "" and "--force" in err
    code, out, _ = run(["evolve", H, str(s), "--pseudometric", P, "--t-max", "5", "--force"], capsys)
    assert code == 2
    header, _, data = read_csv(out)
    assert any("WARNING" in h for h in header)
    assert data[-1, 2] > 10 * data[0, 2]


def test_sweep(capsys, tmp_path):
    out_path = tmp_path / "sweep.csv"
    code, out, _ = run(["sweep", "--family", "pt2", "--param", "a=0:1.5:0.5", "--param", "b=1", "--out", str(out_path)], capsys)
    assert code == 0 and out == ""
    lines = out_path.read_text().splitlines()
    assert lines[0] == "a,b,verdict,max_im_E,min_theta_eig"
    assert len(lines) == 5
    assert [l.split(",")[2] for l in lines[1:]] == ["Unbroken", "Unbroken", "ExceptionalPoint", "Broken"]
    code, out, _ = run(["sweep", "--family", "PT2Cell", "--param", "a=0.2", "--param", "b=1"], capsys)
    assert len(out.splitlines()) == 2


def test_sweep_bad_grids(capsys):
    code, _, err = run(["sweep", "--family", "pt2", "--param", "a=0:1:0", "--param", "b=1"], capsys)
    assert code == 1 and "InvalidGrid" in err
    code, _, err = run(["sweep", "--family", "pt2", "--param", "a=0:1:0.5", "--param", "c=1"], capsys)
    assert code == 1
    with pytest.raises(InvalidGrid):
        parse_axis("a=x,y")
    assert parse_axis("gamma=0:1:0.25") == ("gamma", [0.0, 0.25, 0.5, 0.75, 1.0])
    assert parse_axis("n=2,3,5") == ("n", [2.0, 3.0, 5.0])


def test_read_errors(tmp_path):
    p = tmp_path / "x.json"
    p.write_text('{"dim": 2, "matrix": [[[1, 0], [0, 0]], [[0, 0], [1, "a"]]]}')
    with pytest.raises(ParseError):
        read_operator(p)
    p.write_text("[1, 2]")
    with pytest.raises(ParseError):
        read_operator(p)
    p.write_text('{"dim": 2, "vector": [[1, 0]]}')
    with pytest.raises(ValueError):
        read_state(p)


finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@settings(max_examples=50, deadline=None)
@given(n=st.integers(1, 5), data=st.data())
def test_operator_round_trip(tmp_path_factory, n, data):
    vals = data.draw(st.lists(finite, min_size=2 * n * n, max_size=2 * n * n))
    M = (np.array(vals[: n * n]) + 1j * np.array(vals[n * n :])).reshape(n, n)
    path = tmp_path_factory.mktemp("rt") / "op.json"
    write_operator(path, M, label="rt")
    back, meta = read_operator(path)
    assert meta["label"] == "rt" and meta["dim"] == n
    assert np.array_equal(back.view(np.float64), M.view(np.float64))


def test_entry_point(files, tmp_path):
    H, P = files(0.6, 1.0)
    proc = subprocess.run([sys.executable, "-m", "quasiherm.cli", "analyze", H, P], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["verdict"] == "Unbroken"
