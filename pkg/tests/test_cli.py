"""Command-line interface: exit codes, JSON reports, file output."""

import json
from pathlib import Path

import pytest

from gcsym.cli import main
from gcsym.expr import parse

SL2 = """\
depvar: v
equation.r: 2
equation.H: (v*v_2 - (5/6)*v_1^2)/x^2 + v_1
operator.form: reduced
operator.eta: x^3*v_3 - 12*x^2*v_2 + 60*x*v_1 - 120*v + 12*x^3
ansatz.params: phi4 phi5 phi6
ansatz.F: 2*x^3 + phi4*x^4 + phi5*x^5 + phi6*x^6
"""

NEGATIVE = """\
equation.r: 2
equation.H: u_2 + x
operator.form: reduced
operator.eta: u_1
"""

CONVERT = """\
depvar: v
equation.r: 2
equation.H: v_2 - v^3/x^3 + (9/4)*v/x^2
operator.form: usual
operator.tau: 1
operator.xi: (3/2)*2^(1/2)*v/x^(3/2) - 3/x
operator.eta: -(3/2)*(v^3/x^3 - (3/2)*2^(1/2)*v^2/x^(5/2) - v/x^2 + 2*2^(1/2)/x^(3/2))
family.params: c1 c2
family.f: (2*x)^(1/2)*(3*x^4 + (24*t + c1)*x^2 - c2)/(x^4 + (24*t + c1)*x^2 + c2)
"""


@pytest.fixture
def sl2_file(tmp_path):
    path = tmp_path / "sl2.gcs"
    path.write_text(SL2)
    return path


def test_check_positive(sl2_file, capsys):
    assert main(["check", str(sl2_file)]) == 0
    out = capsys.readouterr().out
    assert "agreement: yes" in out
    assert "seed: 12648430" in out


def test_check_negative_exit_code(tmp_path, capsys):
    path = tmp_path / "neg.gcs"
    path.write_text(NEGATIVE)
    assert main(["check", str(path)]) == 1
    out = capsys.readouterr().out
    assert "not-a-symmetry" in out


def test_check_json_schema_and_round_trip(sl2_file, capsys):
    assert main(["check", str(sl2_file), "--json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["command"] == "check"
    assert report["agreement"] is True
    assert {c["oracle"] for c in report["checks"]} == {
        "determining-equation", "involutivity", "integrability"}
    # embedded expressions re-parse
    parse(report["operator"]["eta_check"], depvar="v")
    for check in report["checks"]:
        parse(check["residual"], depvar="v")


def test_reduce_json(sl2_file, capsys):
    assert main(["reduce", str(sl2_file), "--json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["reduced"] is True
    assert len(report["G"]) == 3
    for g in report["G"]:
        parse(g, params=["phi4", "phi5", "phi6"])


def test_reduce_not_reducible(tmp_path, capsys):
    path = tmp_path / "bad.gcs"
    path.write_text(SL2.replace("2*x^3 +", "3*x^3 +"))
    assert main(["reduce", str(path)]) == 1
    assert "not reducible" in capsys.readouterr().out


def test_convert_and_verify(tmp_path, capsys):
    path = tmp_path / "conv.gcs"
    path.write_text(CONVERT)
    assert main(["convert", str(path)]) == 0
    out = capsys.readouterr().out
    assert "canonical form: v_2 =" in out
    assert main(["verify-solution", str(path)]) == 0
    out = capsys.readouterr().out
    assert "solves equation: probably-zero" in out


def test_convert_trivial_point_fields(tmp_path, capsys):
    burgers = "equation.r: 2\nequation.H: u_2 + u*u_1\noperator.form: usual\n"
    d_x = tmp_path / "dx.gcs"
    d_x.write_text(burgers + "operator.tau: 0\noperator.xi: 1\noperator.eta: 0\n")
    assert main(["convert", str(d_x), "--json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert parse(report["reduced_eta"]) == parse("-u_1")
    assert report["canonical"] == {"rho": 1, "eta_check": "0"}

    d_t = tmp_path / "dt.gcs"
    d_t.write_text(burgers + "operator.tau: 1\noperator.xi: 0\noperator.eta: 0\n")
    assert main(["convert", str(d_t), "--json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert parse(report["reduced_eta"]) == parse("-u_2 - u*u_1")
    assert report["check"]["verdict"] in ("symmetry", "probable")


def test_check_translation_on_heat(tmp_path, capsys):
    path = tmp_path / "heat.gcs"
    path.write_text("equation.r: 2\nequation.H: u_2\n"
                    "operator.form: reduced\noperator.eta: u_1\n")
    assert main(["check", str(path)]) == 0
    assert "agreement: yes" in capsys.readouterr().out


def test_derive_operator(sl2_file, capsys):
    assert main(["derive-operator", str(sl2_file)]) == 0
    assert "round-trip identities: pass" in capsys.readouterr().out


def test_missing_section_is_exit_2(tmp_path, capsys):
    path = tmp_path / "empty.gcs"
    path.write_text("depvar: u\n")
    assert main(["check", str(path)]) == 2
    assert "error:" in capsys.readouterr().err


def test_out_flag_writes_file(sl2_file, tmp_path, capsys):
    out_path = tmp_path / "report.json"
    assert main(["check", str(sl2_file), "--json", "--out", str(out_path)]) == 0
    assert capsys.readouterr().out == ""
    report = json.loads(out_path.read_text())
    assert report["exit_code"] == 0


def test_seed_and_points_flags(sl2_file, capsys):
    assert main(["check", str(sl2_file), "--seed", "0xBEEF", "--points", "10",
                 "--json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["seed"] == 0xBEEF
    assert report["points"] == 10


def test_demo_exit_codes(capsys):
    for name in ("heat", "sl2", "fast-diffusion-w"):
        assert main(["demo", name]) == 0, name
        out = capsys.readouterr().out
        assert "FAIL" not in out


def test_demo_json(capsys):
    assert main(["demo", "heat", "--json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["name"] == "heat"
    assert all(step["ok"] for step in report["steps"])


def test_shipped_problem_files(capsys):
    problems = Path(__file__).parent.parent / "problems"
    for name in ("sl2", "fast-diffusion-w", "heat"):
        path = problems / f"{name}.gcs"
        assert main(["check", str(path)]) == 0, name
        capsys.readouterr()
        assert main(["reduce", str(path)]) == 0, name
        capsys.readouterr()
    vpath = problems / "fast-diffusion-v.gcs"
    assert main(["convert", str(vpath)]) == 0
    capsys.readouterr()
    assert main(["verify-solution", str(vpath)]) == 0
    capsys.readouterr()
    assert main(["check", str(vpath)]) == 0  # usual operator converts, then checks
    capsys.readouterr()
