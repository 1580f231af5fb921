from __future__ import annotations

import csv
import json

import pytest

from flrwext.cli import EXIT_HYPOTHESIS, EXIT_INPUT, EXIT_OK, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_classify_milne(capsys):
    code, out, _ = run(capsys, "classify", "-a", "t")
    assert code == EXIT_OK
    assert json.loads(out)["is_milne_like"] is True


def test_classify_sqrt_euclidean(capsys):
    code, out, _ = run(capsys, "classify", "-a", "sqrt(t)", "-g", "euclidean")
    rep = json.loads(out)
    assert code == EXIT_OK
    assert rep["is_open_flrw"] is True
    assert rep["is_milne_like"] is None
    assert rep["a_prime_zero"]["value"] == "+inf"


def test_syntax_error_exit(capsys):
    code, _, err = run(capsys, "classify", "-a", "tanh(")
    assert code == EXIT_INPUT and "offset 5" in err


def test_bad_flags(capsys, tmp_path):
    assert run(capsys, "classify", "-a", "t", "--tol", "0")[0] == EXIT_INPUT
    assert run(capsys, "classify", "-a", "t", "-d", "0")[0] == EXIT_INPUT
    assert run(capsys, "extend", "-a", "t", "--grid", "3by3")[0] == EXIT_INPUT
    assert run(capsys, "classify")[0] == EXIT_INPUT
    assert run(capsys, "nonsense")[0] == EXIT_INPUT


def test_curvature_power_law(capsys, tmp_path):
    out = tmp_path / "r.csv"
    rep = tmp_path / "r.json"
    code, _, _ = run(capsys, "curvature", "-a", "sqrt(t)", "-d", "1", "-o", str(out), "--report", str(rep))
    assert code == EXIT_OK
    summary = json.loads(rep.read_text())
    assert summary["power_law_exponent"] == pytest.approx(-2.0, abs=0.01)
    assert summary["R_t_squared_at_tmin"] == pytest.approx(-0.5, rel=1e-9)
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 50 and set(rows[0]) == {"t", "R_scalar"}


def test_curvature_flat_and_quadratic(capsys, tmp_path):
    rep = tmp_path / "r.json"
    run(capsys, "curvature", "-a", "t", "-d", "3", "-o", str(tmp_path / "a.csv"), "--report", str(rep))
    assert json.loads(rep.read_text())["flat"] is True
    run(capsys, "curvature", "-a", "t + t^2", "-d", "3", "-o", str(tmp_path / "b.csv"), "--report", str(rep))
    assert json.loads(rep.read_text())["power_law_exponent"] == pytest.approx(-1.0, abs=0.01)


def test_extend_milne_closed_form(capsys, tmp_path):
    code, out, _ = run(capsys, "extend", "--chart", "milne", "-a", "tanh(t)", "--csv", str(tmp_path / "f.csv"))
    rep = json.loads(out)
    assert code == EXIT_OK
    assert rep["closed_form_max_rel_diff"] < 1e-9
    assert rep["isometry_residual"] < 1e-8
    assert rep["boundary_continuous"] is True
    assert (tmp_path / "f.csv").read_text().startswith("T,R,factor,region")


def test_extend_null_and_guard(capsys):
    code, out, _ = run(capsys, "extend", "--chart", "null2d", "-a", "sqrt(t)")
    assert code == EXIT_OK and json.loads(out)["det_max_deviation"] <= 1e-12
    code, _, err = run(capsys, "extend", "--chart", "milne", "-a", "sqrt(t)")
    assert code == EXIT_HYPOTHESIS and "not Milne-like" in err


def test_sss_commands(capsys, tmp_path):
    code, out, _ = run(capsys, "sss", "-a", "sqrt(t)", "-g", "euclidean", "-R", "1",
                       "--csv", str(tmp_path / "s.csv"), "--curve-csv", str(tmp_path / "k.csv"))
    rep = json.loads(out)
    assert code == EXIT_OK and rep["g_limit"]["verdict"] == "zero" and rep["identity_residual"] < 1e-9
    assert (tmp_path / "k.csv").read_text().startswith("t,r_star")
    code, out, _ = run(capsys, "sss", "-a", "t", "-g", "hyperbolic", "-R", "1")
    assert all(abs(g - 1.0) < 1e-9 for _, g in json.loads(out)["G_samples_at_R"])
    code, out, _ = run(capsys, "sss", "-a", "t+t^2", "-g", "hyperbolic", "-R", "1")
    assert json.loads(out)["diagnostic_only"] is True


def test_sss_gauge_rejection(capsys):
    code, _, err = run(capsys, "sss", "-a", "t", "--gauge", "0*s + 1")
    assert code == EXIT_INPUT and "gauge" in err


def test_divergence_table(capsys, tmp_path):
    code, out, err = run(capsys, "divergence", "--eps", "0.1")
    rows = list(csv.DictReader(out.splitlines()))
    assert code == EXIT_OK
    assert [round(float(r["bound"]), 3) for r in rows] == [0.436, 1.411, 4.471, 14.142]
    assert json.loads(err)["max_length_vs_bound"] < 1e-9
    code, out, _ = run(capsys, "divergence", "--dh", "5", "--T", "3,10")
    rows = list(csv.DictReader(out.splitlines()))
    assert rows[0]["bound"] == "" and "not timelike" in rows[0]["error"]
    assert float(rows[1]["bound"]) == pytest.approx(75**0.5)
    code, out, _ = run(capsys, "divergence", "--dh", "0", "--T", "7", "--tau0", "2")
    assert float(list(csv.DictReader(out.splitlines()))[0]["bound"]) == 5.0


def test_deterministic_output(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert main(["extend", "--chart", "null2d", "-a", "tanh(t)", "--seed", "5", "-o", str(path)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_no_partial_file_on_failure(tmp_path):
    out = tmp_path / "never.json"
    assert main(["extend", "--chart", "milne", "-a", "sqrt(t)", "-o", str(out)]) == EXIT_HYPOTHESIS
    assert not out.exists()
    assert list(tmp_path.iterdir()) == []


def test_config_file(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# classification run\nscale-factor = tanh(t)\ngeometry = hyperbolic\ntol = 1e-6\n")
    code, out, _ = run(capsys, "classify", "--config", str(cfg))
    assert code == EXIT_OK and json.loads(out)["scale_factor"] == "tanh(t)"
    # explicit flags win over the file
    code, out, _ = run(capsys, "classify", "--config", str(cfg), "-a", "t")
    assert json.loads(out)["scale_factor"] == "t"
    cfg.write_text("colour = blue\n")
    assert run(capsys, "classify", "--config", str(cfg))[0] == EXIT_INPUT
