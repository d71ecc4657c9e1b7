import csv
import io

import numpy as np
import pytest

from stabilizer_lab.density import Verdict
from stabilizer_lab.errors import (
    DegeneracyGroupingAmbiguous,
    Infeasible,
    MissingAlpha,
    NotStabilizable,
    NotStandardForm,
    NotTwoMode,
)
from stabilizer_lab.gaussian import (
    ScenarioPoint,
    closed_form_nu,
    covariance_rhs,
    entanglement_mixed,
    entanglement_mixed_terms,
    evolve_covariance,
    full_report_cv,
    geometric_conditions_cv,
    geometric_tolerances,
    group_z,
    log_negativity,
    mixed_closed_form,
    mixed_model_nu,
    mixed_spec,
    spectral_conditions_cv,
    squeezed_thermal_residuals,
    sweep_csv,
    symplectic_spectrum_drift,
    synthesize_G,
)
from stabilizer_lab.gaussian_core import (
    GaussianDissipatorSpec,
    LinearLindbladSpec,
    UnitaryChannelSpec,
    channel_K3,
    dissipator,
    ladder_row,
    linear_model,
    squeezed_thermal,
    standard_form,
)

MODEL_I = GaussianDissipatorSpec(1.0, linear_model("i"))


def test_closed_form_values():
    assert closed_form_nu("i", 0.5) == pytest.approx((np.cosh(1) / 2,) * 2)
    assert closed_form_nu("iii", 0.7, 0.7) == (0.5, 0.5)
    assert closed_form_nu("ii", 1.0)[0] == pytest.approx(np.cosh(2) / 2)
    with pytest.raises(MissingAlpha):
        closed_form_nu("iii", 0.5)


@pytest.mark.parametrize("r", [0.2, 0.5, 1.0])
def test_model_i_solution_family(r):
    nu, _ = closed_form_nu("i", r)
    assert spectral_conditions_cv(squeezed_thermal(nu, nu, r).V, MODEL_I).stabilizable
    assert not spectral_conditions_cv(squeezed_thermal(nu + 0.1, nu + 0.1, r).V, MODEL_I).stabilizable
    geom = geometric_conditions_cv(squeezed_thermal(nu, nu, r).V, MODEL_I)
    assert np.abs(geom).max() <= 1e-10


def test_vacuum_under_damping_is_fixed():
    geom = geometric_conditions_cv(np.eye(4) / 2, MODEL_I)
    assert np.abs(geom).max() == 0
    g = synthesize_G(np.eye(4) / 2, MODEL_I)
    assert np.abs(g).max() == 0


def test_engineered_fixed_point_gives_zero_G():
    v = squeezed_thermal(0.5, 0.5, 0.8).V
    spec = GaussianDissipatorSpec(1.0, linear_model("iii", 0.8))
    g = synthesize_G(v, spec)
    assert np.abs(g).max() <= 1e-12
    assert np.linalg.norm(covariance_rhs(v, spec, g)) <= 1e-12


def test_synthesized_G_is_real_symmetric_and_stationary():
    nu, _ = closed_form_nu("i", 0.5)
    v = squeezed_thermal(nu, nu, 0.5).V
    g = synthesize_G(v, MODEL_I)
    assert g.dtype == float
    np.testing.assert_array_equal(g, g.T)
    assert np.linalg.norm(covariance_rhs(v, MODEL_I, g)) <= 1e-8 * np.linalg.norm(dissipator(MODEL_I, v))
    assert np.linalg.norm(evolve_covariance(v, MODEL_I, 5.0, g) - v) <= 1e-6


def test_synthesis_refuses_non_stabilizable():
    with pytest.raises(NotStabilizable):
        synthesize_G(squeezed_thermal(1.0, 1.0, 0.5).V, MODEL_I)


def test_unitary_amplifier_geometric_residuals():
    # the k=1 trace vanishes identically for a pure similarity channel; k=2 does not
    spec = GaussianDissipatorSpec(0.0, None, 1.0, UnitaryChannelSpec(((1.0, channel_K3(0.5)),)))
    geom = geometric_conditions_cv(squeezed_thermal(0.8, 1.1, 0.3).V, spec)
    assert abs(geom[0]) <= 1e-12
    assert abs(geom[1]) > 1e-3


def test_odd_geometric_conditions_vanish_for_linear_dissipation():
    for model, alpha in (("i", None), ("ii", None), ("iii", 0.4)):
        spec = GaussianDissipatorSpec(1.0, linear_model(model, alpha))
        for nu1, nu2, r in ((0.7, 1.3, 0.4), (1.5, 0.9, 1.1)):
            v = squeezed_thermal(nu1, nu2, r).V
            geom = geometric_conditions_cv(v, spec)
            tol = geometric_tolerances(v, spec)
            assert abs(geom[0]) <= tol[0] and abs(geom[2]) <= tol[2]


def test_degenerate_counterexample_passes_geometric_only():
    c = np.array([np.sqrt(3) * ladder_row(2, [(1, 1, False)]), ladder_row(2, [(1, 2, True)])])
    spec = GaussianDissipatorSpec(1.0, LinearLindbladSpec(c))
    rep = full_report_cv(np.eye(4), spec)
    assert rep.verdict is Verdict.NOT_STABILIZABLE
    assert rep.geometric_verdict is Verdict.INCONCLUSIVE_GEOMETRIC
    assert symplectic_spectrum_drift(np.eye(4), spec) > 1e-8


def test_grouping_ambiguity_is_reported():
    z = np.array([1j, -1j, 1j + 5e-9j, -1j - 5e-9j])
    with pytest.raises(DegeneracyGroupingAmbiguous):
        group_z(z, 1e-9)
    assert group_z(np.array([1j, -1j, 1j, -1j]), 1e-9) == ((0, 2), (1, 3))


def test_conjugate_groups_are_marked_redundant():
    nu, _ = closed_form_nu("i", 0.5)
    cond = spectral_conditions_cv(squeezed_thermal(nu, nu, 0.5).V, MODEL_I)
    assert len(cond.residuals) == 6
    assert len(cond.redundant) == 3
    for (a, b) in cond.redundant:
        assert cond.eigendata.z[a].imag < 0


def test_mixed_model_values():
    assert mixed_model_nu(1.0, 0.0, 1.0, 0.3, 0.5) == pytest.approx(np.cosh(2 * 0.7) / 2)
    nu = mixed_model_nu(1.0, 0.1, 1.0, 0.3, 0.5)
    spec = mixed_spec(1.0, 0.1, 0.3, 0.5)
    assert max(abs(x) for x in squeezed_thermal_residuals(nu, nu, 1.0, spec)) <= 1e-10
    gu = 0.2
    assert mixed_model_nu(gu * (np.cosh(1.0) - 1), gu, 1.0, 0.3, 0.5) is None


def test_mixed_closed_form_matches_evaluator(rng):
    for _ in range(10):
        nu1, nu2, r = rng.uniform(0.5, 3), rng.uniform(0.5, 3), rng.uniform(0.1, 2)
        gl, gu, alpha, delta = rng.uniform(0.5, 2), rng.uniform(0, 1), rng.uniform(0, 1), rng.uniform(0, 1)
        got = squeezed_thermal_residuals(nu1, nu2, r, mixed_spec(gl, gu, alpha, delta))
        ref = mixed_closed_form(nu1, nu2, r, gl, gu, alpha, delta)
        assert got == pytest.approx(ref, abs=1e-10)


def test_equal_symplectic_eigenvalues_are_necessary():
    r = 0.9
    for nu1 in np.linspace(0.5, 3, 11):
        for nu2 in np.linspace(0.5, 3, 11):
            a, b = mixed_closed_form(nu1, nu2, r, 1.0, 0.1, 0.3, 0.5)
            diff = a * np.sinh(r) ** 2 - b * np.cosh(r) ** 2
            assert (abs(diff) <= 1e-12) == (abs(nu1 - nu2) <= 1e-12)


def test_log_negativity():
    assert log_negativity(np.eye(4) / 2) == 0
    for r in (0.1, 0.6, 1.3):
        assert log_negativity(squeezed_thermal(0.5, 0.5, r)) == pytest.approx(2 * r, abs=1e-12)
    assert log_negativity(standard_form(1.0, 1.0, 0, 0)) == 0
    with pytest.raises(NotTwoMode):
        log_negativity(np.eye(2) / 2)
    v = np.eye(4) / 2
    v[0, 1] = v[1, 0] = 0.1
    with pytest.raises(NotStandardForm):
        log_negativity(v)


def test_entanglement_mixed_cases():
    r = 0.8
    assert entanglement_mixed(1.0, 0.0, r, 0.0, 0.5) == pytest.approx(-np.log(np.exp(-2 * r) * np.cosh(2 * r)))
    assert entanglement_mixed(1.0, 0.0, r, r, 0.5) == pytest.approx(2 * r)
    with pytest.raises(Infeasible):
        entanglement_mixed_terms(0.1, 1.0, r, 0.3, 1.0)


def test_entanglement_decreases_with_amplification():
    values = [entanglement_mixed_terms(1.0, gu, 1.0, 0.3, 0.5) for gu in np.linspace(0, 0.8, 9)]
    totals = [sum(v) for v in values]
    assert all(b < a for a, b in zip(totals, totals[1:]))
    assert all(v[1] <= 0 for v in values)


def test_report_json_and_sweep_csv():
    nu, _ = closed_form_nu("i", 0.5)
    doc = full_report_cv(squeezed_thermal(nu, nu, 0.5).V, MODEL_I).to_json()
    assert doc["verdict"] == "Stabilizable"
    assert len(doc["G"]) == 4
    text = sweep_csv([ScenarioPoint("i", 0.5), ScenarioPoint("mixed", 1.0, 0.3, 0.5, 1.0, 0.1), ScenarioPoint("mixed", 1.0, 0.3, 1.0, 0.1, 1.0)])
    rows = list(csv.DictReader(io.StringIO(text)))
    assert list(rows[0]) == ["model", "r", "alpha", "delta", "gamma_L", "gamma_U", "nu1", "nu2", "verdict", "E_N"]
    assert [r["verdict"] for r in rows] == ["Stabilizable", "Stabilizable", "Infeasible"]
