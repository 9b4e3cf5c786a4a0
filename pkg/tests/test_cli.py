import csv
import io
import json
from fractions import Fraction

import pytest

from gbchern import combinat
from gbchern.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--no-timestamp")
    return code, json.loads(out)


def test_coefficients_table(capsys):
    code, data = run_json(capsys, "coefficients", "--m-max", "6")
    assert code == 0 and data["schema"] == 1
    rows = {r["m"]: r for r in data["rows"]}
    assert rows[2]["a"] == ["1"] and rows[2]["b"] == ["1"] and rows[2]["c"] == ["1"]
    assert rows[4]["a"] == ["1/3", "1/2"]
    assert rows[4]["b"] == ["2", "1"]
    assert rows[4]["c"] == ["-1", "1"]
    for row in rows.values():
        assert row["gamma_sum"] == str(row["double_factorial_m_minus_2"])
    assert data["problems"] == []


@pytest.mark.parametrize("bad", ["5", "0", "22"])
def test_coefficients_guard(capsys, bad):
    code, out, err = run(capsys, "coefficients", "--m-max", bad)
    assert code == 2 and "m-max" in err


def test_coefficients_csv_and_text(capsys):
    code, out, _ = run(capsys, "coefficients", "--m-max", "4", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and rows[1] == {"m": "4", "k": "0", "a": "1/3", "b": "2", "c": "-1", "gamma": "-1"}
    code, out, _ = run(capsys, "coefficients", "--m-max", "4", "--format", "text")
    assert "sum gamma = 2  (m-2)!! = 2" in out


def test_corrupted_coefficient_fails_coefficients_table(capsys, monkeypatch):
    real = combinat.coeff_b
    monkeypatch.setattr(combinat, "coeff_b", lambda m, k: real(m, k) + (1 if (m, k) == (6, 1) else 0))
    code, data = run_json(capsys, "coefficients", "--m-max", "8")
    assert code == 1
    assert any("m=6, k=1" in p for p in data["problems"])


def test_verify_coefficients_passes(capsys):
    code, data = run_json(capsys, "verify", "coefficients")
    assert code == 0 and data["passed"]
    assert data["reports"][0]["name"].startswith("[1]")


def test_verify_all_with_corrupted_coefficient(capsys, monkeypatch):
    real = combinat.coeff_b
    monkeypatch.setattr(combinat, "coeff_b", lambda m, k: real(m, k) * 2 if (m, k) == (8, 2) else real(m, k))
    code, data = run_json(capsys, "verify", "all")
    assert code == 1 and not data["passed"]
    failed = [r for r in data["reports"] if not r["passed"]]
    assert [r["name"] for r in failed] == ["[1] coefficient identities"]
    assert any("b = a 2^k k! (m-2k-1)! at m=8, k=2" in d for d in failed[0]["details"])


def test_verify_text_output(capsys):
    code, out, _ = run(capsys, "verify", "coefficients", "--format", "text")
    assert code == 0 and out.startswith("PASS  [1]")


def test_verify_unknown_suite(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "everything"])
    assert exc.value.code == 2


@pytest.mark.parametrize("selector, chi", [("sphere:m=2", 2), ("ball-cross-sphere:p=2,q=1", 2),
                                           ("euclidean-ball:m=4", 1), ("flat-torus:m=4", 0),
                                           ("hyperbolic-ball:m=2,r=1", 1), ("euclidean-ball:m=3", 1)])
def test_gauss_bonnet_models(capsys, selector, chi):
    code, data = run_json(capsys, "gauss-bonnet", selector)
    assert code == 0 and data["passed"]
    key = "degree_estimate" if data.get("kind") == "flat" else "chi_estimate_b"
    assert data[key] == pytest.approx(chi, abs=1e-9)


def test_gauss_bonnet_exact_strings(capsys):
    _, data = run_json(capsys, "gauss-bonnet", "ball-cross-sphere:p=2,q=1")
    assert data["exact"]["chi_estimate_c"] == "2"
    assert data["exact"]["boundary_b"] == ["0", "8*pi^2"]


def test_gauss_bonnet_formulation_filter(capsys):
    _, data = run_json(capsys, "gauss-bonnet", "euclidean-ball:m=4", "--formulation", "c")
    assert "chi_estimate_c" in data and "chi_estimate_b" not in data


def test_gauss_bonnet_quadrature(capsys):
    code, data = run_json(capsys, "gauss-bonnet", "sphere:m=4", "--mode", "float", "--method", "quadrature")
    assert code == 0 and data["interior_method"] == "quadrature"
    assert data["abs_err_b"] <= 1e-6


def test_gauss_bonnet_tolerance_failure(capsys):
    code, data = run_json(capsys, "gauss-bonnet", "sphere:m=4", "--mode", "float", "--method", "quadrature",
                          "--quad-level", "1", "--tol", "1e-14")
    assert code == 1 and not data["passed"]


@pytest.mark.parametrize("argv", [["gauss-bonnet", "klein-bottle"],
                                  ["gauss-bonnet", "hyperbolic-ball:m=4", "--mode", "exact"],
                                  ["gauss-bonnet", "sphere:m=4,q=1"],
                                  ["gauss-bonnet", "sphere:m=6", "--mode", "float", "--method", "quadrature"],
                                  ["density", "round-sphere:m=2", "--mode", "exact"],
                                  ["density", "round-sphere:m=2", "--point", "0.0005,1"],
                                  ["density", "round-sphere:m=2", "--point", "a,b"],
                                  ["density", "torus"]])
def test_configuration_errors(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == "" and "configuration error" in err


def test_unknown_model_lists_registry(capsys):
    _, _, err = run(capsys, "gauss-bonnet", "klein-bottle")
    for name in ("sphere", "ball-cross-sphere", "hyperbolic-ball", "euclidean-ball"):
        assert name in err


def test_json_is_deterministic(capsys, tmp_path):
    outs = []
    for i in range(2):
        path = tmp_path / f"r{i}.json"
        assert main(["gauss-bonnet", "ball-cross-sphere:p=2,q=3", "--no-timestamp", "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    assert capsys.readouterr().out == ""


def test_timestamp_present_by_default(capsys):
    code, out, _ = run(capsys, "gauss-bonnet", "sphere:m=2")
    assert "generated" in json.loads(out)


def test_gauss_bonnet_csv(capsys):
    code, out, _ = run(capsys, "gauss-bonnet", "sphere:m=4", "--format", "csv")
    row = next(csv.DictReader(io.StringIO(out)))
    assert row["chi_estimate_b"] == "2.0" and row["model"] == "sphere:m=4"


def test_density_model(capsys):
    code, data = run_json(capsys, "density", "sphere:m=4")
    assert code == 0
    assert data["gb_density"] == "3"
    assert data["lk_densities"] == ["1", "6", "3"]
    _, data = run_json(capsys, "density", "euclidean-ball:m=3,r=2")
    assert Fraction(data["boundary_gauss_kronecker"]) == Fraction(1, 4)


def test_density_chart(capsys):
    code, data = run_json(capsys, "density", "round-sphere:m=2", "--point", "1.1,0.3")
    assert code == 0 and data["source"] == "chart"
    assert data["gb_density"] == pytest.approx(1.0, abs=1e-5)
    assert data["sectional"]["1,2"] == pytest.approx(1.0, abs=1e-5)
    assert data["residuals"]["first_structure"] < 1e-4
