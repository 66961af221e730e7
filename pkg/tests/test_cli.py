import json

import pytest

from dynrel.cli import run
from dynrel.algebra import RAnd, flatten
from dynrel.dsl import parse_model

from conftest import FIXTURES

DFT = str(FIXTURES / "dbw_dft.drm")
DRBD = str(FIXTURES / "dbw_drbd.drm")


def write(tmp_path, text, name="m.drm"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_analyze_drbd_route(capsys):
    assert run(["analyze", DRBD, "--time", "1000", "--route", "drbd"]) == 0
    body = json.loads(capsys.readouterr().out)
    assert body["method"] == "drbd-structural" and body["kind"] == "drbd"
    assert body["value"] == pytest.approx(0.66145, abs=1e-5)


def test_analyze_dft_route_and_grid(capsys):
    assert run(["analyze", DFT, "--time", "3000", "--grid", "3", "--route", "dft"]) == 0
    body = json.loads(capsys.readouterr().out)
    assert [r["time"] for r in body] == [1000.0, 2000.0, 3000.0]
    assert all(r["method"] == "dft-pie" and r["termCount"] == 63 for r in body)


def test_auto_route_prefers_drbd_and_says_so(capsys):
    assert run(["analyze", DFT, "--time", "1000"]) == 0
    out = capsys.readouterr()
    body = json.loads(out.out)
    assert body["method"] == "drbd-structural" and body["kind"] == "dft"
    assert "1 structural pass instead of 63 inclusion-exclusion terms" in out.err


def test_auto_route_falls_back(tmp_path, capsys):
    # a bare simultaneity gate has no DRBD form and no PIE module shape either
    path = write(tmp_path, """dft M { basic A exponential(rate=1); basic B exponential(rate=1);
        gate T simult A B; top T; }""")
    assert run(["analyze", path, "--time", "1"]) == 3
    assert "drbd route unavailable" in capsys.readouterr().err


def test_csv_output(capsys):
    assert run(["analyze", DRBD, "--time", "1000", "--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("model,kind,method,time,value") and len(lines) == 2


def test_compare(capsys):
    assert run(["compare", DFT, "--time", "1000", "--samples", "1000000", "--seed", "42",
                "--workers", "4"]) == 0
    body = json.loads(capsys.readouterr().out)
    (check,) = body["checks"]
    assert check["residual"] < 1e-6
    assert check["mcAgrees"] and abs(check["mcZ"]) <= 3.5
    assert (check["pieTerms"], check["structuralPasses"]) == (63, 1)
    methods = [r["method"] for r in body["results"]]
    assert methods == ["dft-pie", "drbd-structural", "mc-unreliability", "mc-reliability"]


def test_simulate_is_reproducible(capsys):
    argv = ["simulate", DRBD, "--time", "1000", "--samples", "20000", "--seed", "5"]
    assert run(argv) == 0
    first = capsys.readouterr().out
    assert run(argv + ["--workers", "3"]) == 0
    assert capsys.readouterr().out == first
    assert [r["method"] for r in json.loads(first)] == ["mc-unreliability", "mc-reliability"]


def test_convert(capsys):
    assert run(["convert", DFT]) == 0
    text = capsys.readouterr().out
    assert text.startswith("drbd DBW {")
    m = parse_model(text)
    blocks = flatten(m.top, RAnd)
    assert [getattr(b, "id", None) for b in blocks[:3]] == ["TF", "EF", "BCU"]
    assert len(blocks) == 6


def test_validate_ok(capsys):
    assert run(["validate", DFT]) == 0
    assert json.loads(capsys.readouterr().out)["diagnostics"] == []


def test_diagnostics_exit_2(tmp_path, capsys):
    path = write(tmp_path, "dft M { basic A exponential(rate=1); basic B exponential(rate=1);\n"
                           "gate T pand A B A; top T; }")
    assert run(["analyze", path, "--time", "1"]) == 2
    err = capsys.readouterr().err
    assert f"{path}:2:6: error[E-ARITY]" in err


def test_validation_error_exit_2(tmp_path, capsys):
    path = write(tmp_path, """dft M { basic Y exponential(rate=1);
        spare S active exponential(rate=1) dormancy(1.5); gate T wsp Y S; top T; }""")
    assert run(["validate", path]) == 2
    assert "E-RANGE" in capsys.readouterr().err


def test_unsupported_exit_3(tmp_path, capsys):
    path = write(tmp_path, """drbd M { basic A exponential(rate=1); basic B exponential(rate=1);
        gate T after A B; top T; }""")
    assert run(["convert", path]) == 3
    assert run(["analyze", path, "--time", "1", "--route", "drbd"]) == 3


def test_quadrature_failure_exit_4(tmp_path, capsys):
    path = write(tmp_path, """dft W { basic Y weibull(shape=0.5, scale=1);
        spare S active weibull(shape=0.5, scale=1) dormancy(0.5); gate T wsp Y S; top T; }""")
    assert run(["analyze", path, "--time", "1", "--tol", "1e-300"]) == 4
    assert "did not converge" in capsys.readouterr().err


def test_missing_file_exit_1(tmp_path):
    assert run(["validate", str(tmp_path / "nope.drm")]) == 1


def test_bad_usage_exit_2():
    with pytest.raises(SystemExit) as info:
        run(["analyze", DFT])
    assert info.value.code == 2


def test_tolerance_precedence(tmp_path, monkeypatch, capsys):
    path = write(tmp_path, """dft W { basic Y weibull(shape=0.5, scale=1);
        spare S active weibull(shape=0.5, scale=1) dormancy(0.5); gate T wsp Y S; top T; }""")
    monkeypatch.setenv("DYNREL_TOL", "1e-300")
    assert run(["analyze", path, "--time", "1"]) == 4
    assert run(["analyze", path, "--time", "1", "--tol", "1e-8"]) == 0
    monkeypatch.setenv("DYNREL_TOL", "1e-6")
    assert run(["analyze", path, "--time", "1"]) == 0
    loose = json.loads(capsys.readouterr().out.split("}\n")[-2] + "}")
    assert loose["errorBound"] <= 1e-6
