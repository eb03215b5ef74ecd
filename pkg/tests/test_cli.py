import io
import json
import subprocess
import sys

import numpy as np
import pytest

from complex_jacobi import cli
from complex_jacobi.core import MomentSequence
from complex_jacobi.errors import NormalizationError, ParseError, ZeroOffDiagonal
from complex_jacobi.jacobi import JacobiSpec


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def invoke(*argv):
    out, err = io.StringIO(), io.StringIO()
    try:
        req = cli.parse_request(list(argv))
    except ParseError as exc:
        return 1, "", json.dumps(exc.to_dict())
    code = cli.run(req, stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_parse_jacobi_file(tmp_path):
    spec = cli.parse_jacobi_file(write(tmp_path / "j.json", {"a": [[1, 0]], "b": [[0, 0], [0, 0]]}))
    assert spec.N == 2
    with pytest.raises(ZeroOffDiagonal):
        cli.parse_jacobi_file(write(tmp_path / "z.json", {"a": [[0, 0]], "b": [[0, 0], [0, 0]]}))
    bad = tmp_path / "bad.json"
    bad.write_text('{"a": [[1, 0]],\n "b": [')
    with pytest.raises(ParseError) as err:
        cli.parse_jacobi_file(str(bad))
    assert err.value.fields["line"] == 2
    with pytest.raises(ParseError):
        cli.parse_jacobi_file(write(tmp_path / "m.json", {"a": [[1, 0, 3]], "b": [[0, 0], [0, 0]]}))


def test_parse_moments_file(tmp_path):
    s = cli.parse_moments_file(write(tmp_path / "s.json", {"s": [[1, 0], [0.5, 0]]}))
    assert s.K == 1
    with pytest.raises(NormalizationError):
        cli.parse_moments_file(write(tmp_path / "t.json", {"s": [[2, 0]]}))
    with pytest.raises(ParseError):
        cli.parse_moments_file(write(tmp_path / "u.json", {"s": []}))
    exact = cli.parse_moments_file(write(tmp_path / "e.json", {"s": [[1, 0], ["1/3", "-2/7"]]}), exact=True)
    assert exact.exact and str(exact[1].re) == "1/3"


def test_missing_file_is_input_error(tmp_path):
    code, _, err = invoke("moments", "--jacobi", str(tmp_path / "nope.json"))
    assert code == 1 and json.loads(err)["error"] == "ParseError"


def test_usage_errors_exit_one():
    assert invoke("frobnicate")[0] == 1
    assert invoke("solve")[0] == 1
    assert invoke("solve", "--moments", "x.json", "--tau", "abc")[0] == 1


def test_moments_verb(tmp_path):
    j = write(tmp_path / "j.json", {"a": [[1, 0]] * 8, "b": [[0, 0]] * 9})
    code, out, _ = invoke("moments", "--jacobi", j, "--exact")
    assert code == 0
    assert [v[0] for v in json.loads(out)["s"]] == [1, 0, 1, 0, 2, 0, 5, 0, 14]
    code, out, _ = invoke("moments", "--jacobi", j, "--degree", "4")
    assert json.loads(out)["s"][4] == [2.0, 0.0]


def test_solve_then_verify(tmp_path):
    s = write(tmp_path / "s.json", {"s": [[2.0**-n, 0] for n in range(9)]})
    mu = tmp_path / "mu.json"
    assert invoke("solve", "--moments", s, "--out", str(mu))[0] == 0
    data = json.loads(mu.read_text())
    assert list(data) == ["atoms", "support_radius", "tau", "rho"]
    assert all(a["w"] >= 0 for a in data["atoms"])
    code, out, _ = invoke("verify", "--measure", str(mu), "--moments", s, "--tol", "1e-8")
    assert code == 0 and json.loads(out)["passed"]
    code, out, _ = invoke("verify", "--measure", str(mu), "--moments", s, "--tol", "1e-30")
    assert code == 3 and not json.loads(out)["passed"]


@pytest.mark.parametrize("c", [[0, 0], [1, 0], [0, 1]])
def test_dirac_reconstruct_breaks_solve_succeeds(tmp_path, c):
    z = complex(*c)
    s = write(tmp_path / "d.json", {"s": [[(z**n).real, (z**n).imag] for n in range(8)]})
    code, _, err = invoke("reconstruct", "--moments", s)
    diag = json.loads(err)
    assert code == 2 and diag["error"] == "Breakdown" and diag["k"] == 0
    assert invoke("solve", "--moments", s)[0] == 0


def test_reconstruct_with_signs(tmp_path):
    s = write(tmp_path / "c.json", {"s": [[v, 0] for v in (1, 0, 1, 0, 2, 0, 5, 0)]})
    code, out, _ = invoke("reconstruct", "--moments", s, "--sign", "1,-1,1")
    assert code == 0
    a = json.loads(out)["a"]
    assert np.allclose([x[0] for x in a], [1, -1, 1])


def test_intertwine_report(tmp_path):
    j = write(tmp_path / "j.json", {"a": [["1/2", "1/3"]] * 9, "b": [["1/4", 0]] * 10})
    code, out, _ = invoke("intertwine", "--jacobi", j, "--exact", "--degree", "3")
    rep = json.loads(out)
    assert code == 0
    assert list(rep) == ["intertwining_residual", "gram_min_sv", "degree"]
    assert rep["intertwining_residual"] == 0 and rep["gram_min_sv"] > 0 and rep["degree"] == 3


def test_spectrum_csv(tmp_path):
    j = write(tmp_path / "j.json", {"a": [[1, 0]], "b": [[0, 0], [0, 0]]})
    code, out, _ = invoke("spectrum", "--jacobi", j)
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "re,im"
    vals = sorted(float(line.split(",")[0]) for line in lines[1:])
    assert np.allclose(vals, [-1, 1], atol=1e-14)


def test_canonical_json_roundtrip(tmp_path):
    rng = np.random.default_rng(0)
    spec = JacobiSpec(rng.normal(size=5) + 1j * rng.normal(size=5), rng.normal(size=6) * 1e-7 - 0.0)
    text = cli.dumps(cli.spec_to_json(spec))
    p = tmp_path / "spec.json"
    p.write_text(text)
    assert cli.dumps(cli.spec_to_json(cli.parse_jacobi_file(str(p)))) == text

    s = MomentSequence([1, -0.0, 1e300, 1 / 3 + 2e-20j])
    text = cli.dumps(cli.moments_to_json(s))
    p.write_text(text)
    assert cli.dumps(cli.moments_to_json(cli.parse_moments_file(str(p)))) == text

    mom = write(tmp_path / "h.json", {"s": [[0.7**n, 0.1 * n] for n in range(7)]})
    mu_path = tmp_path / "mu.json"
    invoke("solve", "--moments", mom, "--out", str(mu_path))
    text = mu_path.read_text()
    assert cli.dumps(cli.measure_to_json(cli.parse_measure_file(str(mu_path)))) == text


def test_float_formatting():
    assert cli.dumps(0.1) == "0.10000000000000001\n"
    assert cli.dumps(-0.0) == "-0.0\n"
    assert cli.dumps([1.0, 2]) == "[1.0, 2]\n"
    with pytest.raises(ValueError):
        cli.dumps(float("nan"))


def test_determinism(tmp_path):
    s = write(tmp_path / "s.json", {"s": [[1, 0], [0.2, 0.1], [0.3, -0.4], [0, 0.05], [0.1, 0]]})
    first = invoke("solve", "--moments", s)[1]
    assert first == invoke("solve", "--moments", s)[1]


def test_console_entry_points(tmp_path):
    s = write(tmp_path / "s.json", {"s": [[1, 0], [0.5, 0], [0.25, 0]]})
    for cmd in (["complex-jacobi"], [sys.executable, "-m", "complex_jacobi"]):
        proc = subprocess.run(cmd + ["solve", "--moments", s], capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        assert "atoms" in json.loads(proc.stdout)
    proc = subprocess.run(["complex-jacobi", "reconstruct", "--moments", s], capture_output=True, text=True)
    assert proc.returncode == 0
