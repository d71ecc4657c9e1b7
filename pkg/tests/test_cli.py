import json

import numpy as np
import pytest

from stabilizer_lab import constituent as cs
from stabilizer_lab.cli import main
from stabilizer_lab.gaussian import closed_form_nu
from stabilizer_lab.gaussian_core import GaussianDissipatorSpec, linear_model, squeezed_thermal
from stabilizer_lab.operators import DensityOperator, LindbladSet, annihilation
from stabilizer_lab.reproduce import qubit_decay
from stabilizer_lab.serialize import covariance_to_json, density_to_json, gaussian_spec_to_json, lindblads_to_json


def _density_doc(rho, lind, ignore=()):
    return {"kind": "density", "state": density_to_json(rho), "lindblads": lindblads_to_json(lind), "ignore_levels": list(ignore)}


def _write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


@pytest.fixture
def qubit_decay_file(tmp_path):
    return _write(tmp_path, "ex1.json", _density_doc(*qubit_decay()))


@pytest.fixture
def model_i_file(tmp_path):
    nu, _ = closed_form_nu("i", 0.5)
    doc = {
        "kind": "gaussian",
        "covariance": covariance_to_json(squeezed_thermal(nu, nu, 0.5).V),
        "dissipator": gaussian_spec_to_json(GaussianDissipatorSpec(1.0, linear_model("i"))),
    }
    return _write(tmp_path, "gauss.json", doc)


def test_check_qubit_decay(qubit_decay_file, capsys):
    assert main(["check", qubit_decay_file]) == 1
    doc = json.loads(capsys.readouterr().out)
    assert doc["verdict"] == "NotStabilizable"
    assert max(abs(r["re"]) for r in doc["spectral"]) == 0.5


def test_check_vacuum_under_damping(tmp_path, capsys):
    d = 5
    vac = np.zeros((d, d))
    vac[0, 0] = 1
    path = _write(tmp_path, "vac.json", _density_doc(DensityOperator.from_matrix(vac), LindbladSet((annihilation(d),)), [d - 1]))
    assert main(["check", path]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert np.abs(np.array(doc["H"]["re"])).max() == 0


def test_check_output_is_byte_identical(qubit_decay_file, model_i_file, capsys):
    for path in (qubit_decay_file, model_i_file):
        main(["check", path])
        first = capsys.readouterr().out
        main(["check", path])
        assert capsys.readouterr().out == first


def test_check_table(model_i_file, capsys):
    assert main(["check", model_i_file, "--table"]) == 0
    assert "Stabilizable" in capsys.readouterr().out


def test_malformed_inputs_exit_2(tmp_path, capsys):
    doc = _density_doc(*qubit_decay())
    doc["state"]["d"] = -2
    assert main(["check", _write(tmp_path, "bad.json", doc)]) == 2
    assert json.loads(capsys.readouterr().out)["error"] == "schema_error"
    bad = tmp_path / "broken.json"
    bad.write_text("{not json")
    assert main(["check", str(bad)]) == 2
    assert json.loads(capsys.readouterr().out)["error"] == "malformed_json"
    assert main(["check", str(tmp_path / "missing.json")]) == 2
    capsys.readouterr()
    assert main(["check"]) == 2
    assert json.loads(capsys.readouterr().out)["error"] == "usage"


def test_synthesize_gaussian(model_i_file, tmp_path, capsys):
    out = tmp_path / "G.json"
    assert main(["synthesize", model_i_file, "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["kind"] == "quadratic_hamiltonian"
    assert doc["rhs_norm"] <= 1e-8


def test_synthesize_refuses_two_qubit_w_mixture(tmp_path, capsys):
    e11 = np.zeros(4)
    e11[3] = 1
    rho = cs.ConstituentMixture(cs.w_state(2), 0.5, DensityOperator.pure(e11)).state
    path = _write(tmp_path, "w2.json", _density_doc(rho, cs.local_damping_lindblads(2)))
    out = tmp_path / "H.json"
    assert main(["synthesize", path, "--out", str(out)]) == 1
    assert not out.exists()


def test_bounds(capsys):
    assert main(["bounds", "--family", "ghz", "--n-min", "2", "--n-max", "5"]) == 0
    rows = json.loads(capsys.readouterr().out)
    assert [r["ghz_bound"] for r in rows] == [1 / 3, 1 / 4, 1 / 5, 1 / 6]
    assert main(["bounds", "--family", "w", "--n-min", "2", "--n-max", "4", "--table"]) == 0
    assert main(["bounds", "--family", "w", "--n-min", "5", "--n-max", "14"]) == 2


def test_reproduce_filter_and_empty(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("STABILIZER_LAB_THREADS", "2")
    assert main(["reproduce", "--suite", "paper", "--filter", "example1", "--out", str(tmp_path / "rep")]) == 0
    assert (tmp_path / "rep" / "report.csv").read_text().count("example1_qubit_decay") == 6
    assert main(["reproduce", "--filter", "no-such-scenario"]) == 2


def test_gaussian_filter_selects_examples_5_to_7():
    from stabilizer_lab.reproduce import select

    assert [s.name for s in select("paper", "gaussian")] == [
        "example5_linear_models",
        "example6_unitary_no_go",
        "example7_mixed_model",
    ]


def test_thread_cap(monkeypatch):
    from stabilizer_lab.reproduce import thread_cap

    monkeypatch.setenv("STABILIZER_LAB_THREADS", "3")
    assert thread_cap() == 3
    monkeypatch.setenv("STABILIZER_LAB_THREADS", "0")
    assert thread_cap() == 1
    monkeypatch.setenv("STABILIZER_LAB_THREADS", "many")
    with pytest.raises(ValueError):
        thread_cap()
