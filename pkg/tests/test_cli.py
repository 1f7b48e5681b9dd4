from __future__ import annotations

import json

import numpy as np
import pytest

from samelson_lab import cli, verify
from samelson_lab import geometry as geo
from samelson_lab.liealg import build_algebra, cartan_decomposition
from samelson_lab.samelson import biinvariant_metric, build_samelson_structure


def structure(spec):
    return build_samelson_structure(cartan_decomposition(build_algebra(spec)))


def test_algebra_dump(tmp_path, capsys):
    out = tmp_path / "alg.json"
    # (1) the plain dump carries the Cartan data
    assert cli.main(["algebra", "--group", "A2", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["algebra"]["dimension"] == 8
    assert data["algebra"]["rank"] == 2
    assert len(data["roots"]) == 6
    # (2) --full attaches the complex structure
    assert cli.main(["algebra", "--group", "A2", "--full",
                     "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert "J" in data["structure"]
    # (3) without --out the JSON lands on stdout
    assert cli.main(["algebra", "--group", "A1"]) == 0
    piped = json.loads(capsys.readouterr().out)
    assert piped["algebra"]["dimension"] == 3


def test_cohomology_table_and_export(tmp_path, capsys):
    out = tmp_path / "model.json"
    code = cli.main(["cohomology", "--group", "A2+T2", "--truncation", "4",
                     "--out", str(out)])
    assert code == 0
    text = capsys.readouterr().out
    # (1) the table names every flavor and the quotient dimension
    for flavor in ("dolbeault", "conj_dolbeault", "bott_chern", "aeppli",
                   "de_rham"):
        assert flavor in text
    assert "aeppli (1,1) dimension 4, central square dimension 4" in text
    # (2) the export carries the complex and the named generators
    data = json.loads(out.read_text())
    assert set(data) == {"group", "truncation", "complex", "generators"}
    names = [g["name"] for g in data["generators"]]
    assert names.count("w1") == 1 and names.count("w2") == 1
    assert "nu1" in names and "nu1bar" in names
    assert "psi1" in names and "psi1bar" in names
    # (3) bidegrees: coinvariant generators at (1,1), covectors at (1,0)/(0,1)
    by_name = {g["name"]: g["bidegree"] for g in data["generators"]}
    assert by_name["w1"] == [1, 1]
    assert by_name["nu1"] == [1, 0] and by_name["nu1bar"] == [0, 1]
    assert by_name["psi1"] == [1, 0]
    # (4) the pure-torus covector has no weight on the semisimple coordinates
    psi = next(g for g in data["generators"] if g["name"] == "psi1")
    ss_coeffs = psi["coefficients"][:2]
    assert all(c == "0" for c in ss_coeffs)


def test_flow_subcommand(tmp_path, capsys):
    S = structure("A1+A1")
    Gm = geo.metric_array(biinvariant_metric(S))
    mfile = tmp_path / "metric.json"
    mfile.write_text(json.dumps({"g": Gm.tolist()}))
    trace = tmp_path / "trace.csv"
    code = cli.main(["flow", "--group", "A1+A1", "--metric", str(mfile),
                     "--dt", "0.1", "--t-max", "2.5", "--out", str(trace)])
    assert code == 0
    rep = json.loads(capsys.readouterr().out)
    # (1) the stationary start converges and conserves its class coordinate
    assert rep["flag"] == "converged"
    assert rep["aeppli_drift"] < 1e-12
    assert rep["bismut_flat_norm"] < 1e-9
    # (2) the CSV trace exists with one row per stored state
    lines = trace.read_text().strip().splitlines()
    assert len(lines) == rep["steps"] + 2
    assert lines[0].startswith("t,g_0_0,")


def test_solve_central_subcommand(tmp_path):
    out = tmp_path / "central.json"
    code = cli.main(["solve-central", "--group", "A1+A1+A1+A1",
                     "--torus-j", "mixing", "--full", "--out", str(out)])
    assert code == 0
    data = json.loads(out.read_text())
    # (1) the irreducible case: one essential ray, equal blocks, no antisym part
    assert data["dimension"] == 1
    assert data["b_equal"] is True
    assert data["antisym_kernel_dim"] == 0
    assert len(set(data["identity_b"])) == 1
    assert len(data["basis"]) == 1


def test_torus_j_matrix_file(tmp_path):
    jfile = tmp_path / "J.json"
    jfile.write_text(json.dumps([[0, -1], [1, 0]]))
    # (1) a torus map can come from a JSON matrix on disk
    assert cli.main(["solve-central", "--group", "A1+A1",
                     "--torus-j", str(jfile)]) == 0
    # (2) a matrix that fails to square to minus the identity is refused
    jfile.write_text(json.dumps([[0, 2], [1, 0]]))
    assert cli.main(["solve-central", "--group", "A1+A1",
                     "--torus-j", str(jfile)]) == 2


def test_verify_subset_and_determinism(tmp_path, capsys):
    out = tmp_path / "report.json"
    # (1) a passing subset exits 0 and writes the JSON report
    assert cli.main(["verify", "--only", "05", "--out", str(out)]) == 0
    first = capsys.readouterr().out
    data = json.loads(out.read_text())
    assert data["passed"] is True
    assert data["checks"][0]["name"] == "05-central-system"
    # (2) repeating the same seed reproduces the report byte for byte
    assert cli.main(["verify", "--only", "05", "--out", str(out)]) == 0
    assert capsys.readouterr().out == first
    assert json.loads(out.read_text()) == data
    # (3) a different seed changes the draws but not the verdict
    a = verify.run_verify_suite(0, only="12").checks[0]
    b = verify.run_verify_suite(1, only="12").checks[0]
    assert a.passed and b.passed
    assert a.computed != b.computed


def test_verify_failure_exit(monkeypatch, capsys):
    bad = verify.VerificationReport(seed=0, checks=(verify.CheckResult(
        name="00-stub", claim="stub", expected="1", computed="2",
        tolerance="exact", passed=False),))
    monkeypatch.setattr(cli, "run_verify_suite", lambda seed, only="": bad)
    # (1) any failing check turns into exit code 1
    assert cli.main(["verify"]) == 1
    assert "FAIL 00-stub" in capsys.readouterr().out


def test_usage_errors(tmp_path, capsys):
    # (1) unknown subcommands and missing flags exit 2 via the parser
    assert cli.main(["bogus"]) == 2
    assert cli.main(["cohomology"]) == 2
    # (2) a bad group spec is a usage error, not a crash
    assert cli.main(["cohomology", "--group", "Z9"]) == 2
    # (3) so are a missing metric file and a malformed one
    assert cli.main(["flow", "--group", "A1+A1",
                     "--metric", str(tmp_path / "none.json")]) == 2
    mfile = tmp_path / "m.json"
    mfile.write_text("{\"g\": 3}")
    assert cli.main(["flow", "--group", "A1+A1",
                     "--metric", str(mfile)]) == 2
    # (4) an unmatched verify prefix is reported as usage
    assert cli.main(["verify", "--only", "nope"]) == 2
    capsys.readouterr()


def test_report_text_shape():
    rep = verify.run_verify_suite(0, only="07")
    text = rep.to_text()
    # (1) one verdict line per check plus header and summary
    lines = text.splitlines()
    assert lines[0] == "verification suite, seed 0"
    assert lines[-1] == "1 checks, 1 passed"
    assert lines[1].startswith("PASS 07-flat-torus-family")
    # (2) the JSON report round-trips with the same verdicts
    data = json.loads(rep.to_json())
    assert data["passed"] is True
    assert [c["name"] for c in data["checks"]] == ["07-flat-torus-family"]
    # (3) every registered check name is unique and ordered
    names = verify.check_names()
    assert len(set(names)) == len(names) == 12
    assert list(names) == sorted(names)
