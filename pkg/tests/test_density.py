import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stabilizer_lab.density import (
    DegeneracyPartition,
    Verdict,
    bloch_flux,
    commutant_conditions,
    dissipative_fluxes,
    full_report,
    geometric_conditions,
    refine_degenerate_basis,
    spectral_conditions,
    synthesize_hamiltonian,
)
from stabilizer_lab.errors import NonOrthonormalBasis, NotStabilizable, PartitionMismatch, WrongDimension
from stabilizer_lab.operators import (
    DensityOperator,
    GKLSModel,
    LindbladSet,
    annihilation,
    dissipator_apply,
    gkls_rhs,
    random_density,
    random_lindblads,
    random_unitary,
    steady_state,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)
DECAY = LindbladSet((np.array([[0, 1], [0, 0]]),))


def _stabilizable(seed, d):
    rng = np.random.default_rng(seed)
    lind = random_lindblads(d, 2, rng)
    h0 = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return steady_state(GKLSModel(lind, h0 + h0.conj().T)), lind


def test_maximally_mixed_qubit_is_not_stabilizable():
    rho = DensityOperator.from_matrix(np.eye(2) / 2)
    rep = full_report(rho, DECAY)
    assert rep.verdict is Verdict.NOT_STABILIZABLE
    assert rep.geometric_verdict is Verdict.INCONCLUSIVE_GEOMETRIC
    assert rep.synthesized_H is None
    with pytest.raises(NotStabilizable):
        synthesize_hamiltonian(rho, DECAY)


def test_ground_state_under_decay_needs_no_hamiltonian():
    rho = DensityOperator.from_matrix(np.diag([1.0, 0.0]))
    rep = full_report(rho, DECAY)
    assert rep.verdict is Verdict.STABILIZABLE
    assert np.linalg.norm(rep.synthesized_H) == 0


def test_pure_superposition_fails_geometric_test():
    rho = DensityOperator.pure(np.array([1, 1]) / np.sqrt(2))
    geom = geometric_conditions(rho, DECAY)
    assert abs(geom[0]) > 0.1
    assert full_report(rho, DECAY).geometric_verdict is Verdict.NOT_STABILIZABLE


def test_bloch_flux_inner_product_is_twice_purity_drift(rng):
    for _ in range(5):
        rho = random_density(2, rng)
        lind = random_lindblads(2, 2, rng)
        bf = bloch_flux(rho, lind)
        expected = 2 * np.trace(rho.matrix @ dissipator_apply(lind, rho)).real
        assert bf.inner == pytest.approx(expected, abs=1e-12)
    with pytest.raises(WrongDimension):
        bloch_flux(random_density(3, rng), random_lindblads(3, 1, rng))


def test_fluxes_of_damped_oscillator():
    d = 5
    flux = dissipative_fluxes(np.eye(d), LindbladSet((annihilation(d),)))
    for j in range(1, d):
        assert flux[j - 1, j] == pytest.approx(j)
        assert flux[j, j] == pytest.approx(-j)
    with pytest.raises(NonOrthonormalBasis):
        dissipative_fluxes(2 * np.eye(d), LindbladSet((annihilation(d),)))


@settings(max_examples=25, deadline=None)
@given(seeds, st.integers(min_value=2, max_value=5))
def test_sufficiency_synthesized_hamiltonian_stabilizes(seed, d):
    rho, lind = _stabilizable(seed, d)
    h = synthesize_hamiltonian(rho, lind)
    assert np.linalg.norm(h - h.conj().T) <= 1e-12
    resid = np.linalg.norm(gkls_rhs(GKLSModel(lind, h), rho))
    assert resid <= 1e-8 * np.linalg.norm(dissipator_apply(lind, rho))


@settings(max_examples=25, deadline=None)
@given(seeds, st.integers(min_value=2, max_value=5))
def test_necessity_generic_states_fail(seed, d):
    rng = np.random.default_rng(seed)
    rho = random_density(d, rng)
    lind = random_lindblads(d, 2, rng)
    assert not spectral_conditions(rho, lind).stabilizable


@settings(max_examples=25, deadline=None)
@given(seeds, st.integers(min_value=2, max_value=5))
def test_spectral_matches_commutant_and_implies_geometric(seed, d):
    rho, lind = _stabilizable(seed, d)
    cond = spectral_conditions(rho, lind)
    assert commutant_conditions(rho, lind)[1] == cond.stabilizable
    if cond.stabilizable:
        assert np.abs(geometric_conditions(rho, lind)).max() <= cond.tol_zero


@settings(max_examples=20, deadline=None)
@given(seeds, st.integers(min_value=3, max_value=5))
def test_verdict_is_basis_independent(seed, d):
    rng = np.random.default_rng(seed)
    lind = random_lindblads(d, 2, rng)
    u = random_unitary(d, rng)
    # eigenvalues (0.5, 0.5, rest) give a two-fold degenerate block
    w = np.array([0.5, 0.5] + [0.0] * (d - 2))
    rho = DensityOperator.from_spectrum(w, u)
    base = spectral_conditions(rho, lind)
    q = random_unitary(2, rng)
    v = np.array(rho.eigenvectors)
    v[:, :2] = v[:, :2] @ q
    rotated = spectral_conditions(rho.with_basis(rho.eigenvalues, v), lind)
    assert base.stabilizable == rotated.stabilizable
    # the Frobenius norm of each block's residuals is unitarily invariant
    norm = lambda c: np.sqrt(sum(abs(x) ** 2 for x in c.residuals.values()))  # noqa: E731
    assert norm(base) == pytest.approx(norm(rotated), rel=1e-9, abs=1e-13)


def test_refined_basis_diagonalizes_blocks(rng):
    rho = DensityOperator.from_matrix(np.eye(3) / 3)
    lind = random_lindblads(3, 2, rng)
    refined = refine_degenerate_basis(rho, lind)
    cond = spectral_conditions(refined, lind)
    offdiag = max(abs(v) for (i, j), v in cond.residuals.items() if i != j)
    assert offdiag <= 1e-12


def test_synthesis_is_idempotent():
    rho, lind = _stabilizable(5, 4)
    h1 = synthesize_hamiltonian(rho, lind)
    h2 = synthesize_hamiltonian(rho, lind)
    assert np.array_equal(h1, h2)
    # synthesizing against the already-stabilized model changes nothing
    assert np.linalg.norm(gkls_rhs(GKLSModel(lind, h1), rho)) <= 1e-10


def test_hermitian_lindblads_stabilize_maximally_mixed(rng):
    ops = tuple(op + op.conj().T for op in random_lindblads(3, 2, rng).operators)
    rep = full_report(DensityOperator.from_matrix(np.eye(3) / 3), LindbladSet(ops))
    assert rep.verdict is Verdict.STABILIZABLE


def test_vacuum_with_truncation_boundary():
    d = 6
    lind = LindbladSet((annihilation(d),))
    vac = np.zeros((d, d))
    vac[0, 0] = 1
    rep = full_report(DensityOperator.from_matrix(vac), lind, ignore_levels=[d - 1])
    assert rep.verdict is Verdict.STABILIZABLE
    assert rep.verification_residual <= 1e-12


def test_partition_check():
    rho = DensityOperator.from_matrix(np.diag([0.5, 0.3, 0.2]))
    with pytest.raises(PartitionMismatch):
        spectral_conditions(rho, random_lindblads(3, 1, np.random.default_rng(0)), DegeneracyPartition(((0, 1), (2,))))


def test_report_json_keys():
    rho = DensityOperator.from_matrix(np.eye(2) / 2)
    doc = full_report(rho, DECAY).to_json()
    assert set(doc) == {"verdict", "geometric_verdict", "geometric", "spectral", "H", "rhs_norm", "verify_residual", "tolerances"}
    assert doc["verdict"] == "NotStabilizable"
