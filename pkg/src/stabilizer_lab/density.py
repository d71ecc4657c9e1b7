"""Stabilizability of density operators under a fixed Lindblad dissipator.

A state is stabilizable when some Hamiltonian makes the GKLS right-hand side
vanish. The decisive test works in the state's eigenbasis: the dissipator
image ``D(rho)`` must have no component inside any eigenspace of ``rho``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, NonOrthonormalBasis, NotStabilizable, PartitionMismatch, WrongDimension
from .linalg import hermitian_eigendecomposition
from .operators import (
    DensityOperator,
    GKLSModel,
    LindbladSet,
    dissipator_apply,
    evolve_auto,
    gkls_rhs,
)

TOL_DEGEN = 1e-9
TOL_ZERO_REL = 1e-10
TOL_ZERO_FLOOR = 1e-14
COMMUTANT_SUPEROP_MAX_DIM = 32

PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


class Verdict(str, enum.Enum):
    STABILIZABLE = "Stabilizable"
    NOT_STABILIZABLE = "NotStabilizable"
    INCONCLUSIVE_GEOMETRIC = "Inconclusive_Geometric"


@dataclass(frozen=True)
class DegeneracyPartition:
    """Index blocks of (numerically) equal eigenvalues, in descending order."""

    blocks: tuple
    tol_degen: float = TOL_DEGEN

    @classmethod
    def of(cls, rho: DensityOperator, tol_degen: float = TOL_DEGEN) -> "DegeneracyPartition":
        return cls(group_eigenvalues(rho.eigenvalues, tol_degen), tol_degen)

    def check(self, rho: DensityOperator) -> None:
        """Raise PartitionMismatch unless the blocks describe ``rho``'s spectrum."""
        w = rho.eigenvalues
        flat = sorted(i for b in self.blocks for i in b)
        if flat != list(range(len(w))):
            raise PartitionMismatch("blocks do not partition the eigen-indices")
        for b in self.blocks:
            vals = w[list(b)]
            if vals.max() - vals.min() > self.tol_degen * max(1.0, np.abs(vals).max()):
                raise PartitionMismatch(f"block {b} mixes distinct eigenvalues")
        for b1 in self.blocks:
            for b2 in self.blocks:
                if b1 is b2:
                    continue
                gap = np.abs(w[list(b1)][:, None] - w[list(b2)][None, :]).min()
                if gap <= self.tol_degen:
                    raise PartitionMismatch(f"blocks {b1} and {b2} share an eigenvalue")

    @property
    def is_degenerate(self) -> bool:
        return any(len(b) > 1 for b in self.blocks)


def group_eigenvalues(eigenvalues, tol_degen: float = TOL_DEGEN) -> tuple:
    """Group descending eigenvalues into runs whose neighbours differ by <= tol."""
    w = np.asarray(eigenvalues, dtype=float)
    blocks = []
    current = [0]
    for i in range(1, len(w)):
        if abs(w[i] - w[current[-1]]) <= tol_degen * max(1.0, abs(w[i])):
            current.append(i)
        else:
            blocks.append(tuple(current))
            current = [i]
    blocks.append(tuple(current))
    return tuple(blocks)


def zero_tolerance(d_rho: np.ndarray) -> float:
    return max(TOL_ZERO_FLOOR, TOL_ZERO_REL * float(np.linalg.norm(d_rho)))


def effective_dissipation(rho: DensityOperator, lindblads: LindbladSet, ignore_levels: Sequence[int] = ()) -> np.ndarray:
    """``D(rho)`` with the listed computational-basis levels projected out.

    ``ignore_levels`` drops conditions that live on a truncation boundary
    (for example the top Fock level of a truncated oscillator).
    """
    d_rho = dissipator_apply(lindblads, rho)
    if ignore_levels:
        keep = np.ones(rho.dim)
        keep[list(ignore_levels)] = 0.0
        d_rho = keep[:, None] * d_rho * keep[None, :]
    return d_rho


def geometric_conditions(rho: DensityOperator, lindblads: LindbladSet, ignore_levels: Sequence[int] = ()) -> np.ndarray:
    """``Tr[rho^k D(rho)]`` for ``k = 1 .. d-1``.

    Evaluated as ``sum_l lambda_l^k <psi_l|D(rho)|psi_l>``, which avoids forming
    high matrix powers.
    """
    d_rho = effective_dissipation(rho, lindblads, ignore_levels)
    v = rho.eigenvectors
    diag = np.einsum("il,ij,jl->l", v.conj(), d_rho, v)
    lam = rho.eigenvalues
    ks = np.arange(1, rho.dim)
    vals = (lam[None, :] ** ks[:, None]) @ diag
    scale = max(1.0, float(np.linalg.norm(d_rho)))
    if np.abs(vals.imag).max(initial=0.0) > 1e-12 * scale:
        raise ValueError("geometric residuals picked up an imaginary part")
    return vals.real


@dataclass(frozen=True)
class SpectralConditions:
    residuals: dict = field(repr=False)
    max_residual: float
    tol_zero: float
    partition: DegeneracyPartition

    @property
    def stabilizable(self) -> bool:
        return self.max_residual <= self.tol_zero


def spectral_conditions(
    rho: DensityOperator,
    lindblads: LindbladSet,
    partition: DegeneracyPartition | None = None,
    ignore_levels: Sequence[int] = (),
    tol_zero: float | None = None,
) -> SpectralConditions:
    """Residuals ``<psi_i|D(rho)|psi_j>`` for every ordered pair inside a block."""
    if partition is None:
        partition = DegeneracyPartition.of(rho)
    else:
        partition.check(rho)
    d_rho = effective_dissipation(rho, lindblads, ignore_levels)
    tol = zero_tolerance(d_rho) if tol_zero is None else tol_zero
    v = rho.eigenvectors
    residuals = {}
    for block in partition.blocks:
        vb = v[:, list(block)]
        sub = vb.conj().T @ d_rho @ vb
        for a, i in enumerate(block):
            for b, j in enumerate(block):
                residuals[(i, j)] = complex(sub[a, b])
    biggest = max((abs(x) for x in residuals.values()), default=0.0)
    return SpectralConditions(residuals, biggest, tol, partition)


def refine_degenerate_basis(
    rho: DensityOperator, lindblads: LindbladSet, partition: DegeneracyPartition | None = None
) -> DensityOperator:
    """Rotate each degenerate eigenspace so that ``D(rho)`` is diagonal on it."""
    if partition is None:
        partition = DegeneracyPartition.of(rho)
    d_rho = dissipator_apply(lindblads, rho)
    v = np.array(rho.eigenvectors)
    for block in partition.blocks:
        if len(block) < 2:
            continue
        idx = list(block)
        vb = v[:, idx]
        _, u = hermitian_eigendecomposition(vb.conj().T @ d_rho @ vb)
        v[:, idx] = vb @ u
    return rho.with_basis(rho.eigenvalues, v)


def commutant_basis(rho: DensityOperator, tol_degen: float = TOL_DEGEN) -> list:
    """Orthonormal Hermitian basis of ``{X : [X, rho] = 0}``.

    Small dimensions solve the linear commutation equation directly (kernel of
    ``X -> X rho - rho X``) without using the eigendecomposition; larger ones
    assemble the basis block by block in the eigenbasis.
    """
    d = rho.dim
    if d > COMMUTANT_SUPEROP_MAX_DIM:
        return _commutant_from_blocks(rho, tol_degen)
    m = rho.matrix
    eye = np.eye(d)
    sup = np.kron(eye, m.T) - np.kron(m, eye)
    _, s, vh = np.linalg.svd(sup)
    kernel = vh[s <= tol_degen * max(1.0, float(np.abs(rho.eigenvalues).max()))].conj()
    herm = []
    for vec in kernel:
        x = vec.reshape(d, d)
        herm.append(0.5 * (x + x.conj().T))
        herm.append(-0.5j * (x - x.conj().T))
    if not herm:
        return []
    real_coords = np.array([np.concatenate([h.real.ravel(), h.imag.ravel()]) for h in herm])
    _, s2, vh2 = np.linalg.svd(real_coords, full_matrices=False)
    rank = int(np.sum(s2 > 1e-8 * s2[0]))
    basis = []
    for row in vh2[:rank]:
        x = row[: d * d].reshape(d, d) + 1j * row[d * d:].reshape(d, d)
        basis.append(0.5 * (x + x.conj().T))
    return basis


def _commutant_from_blocks(rho: DensityOperator, tol_degen: float) -> list:
    v = rho.eigenvectors
    basis = []
    for block in group_eigenvalues(rho.eigenvalues, tol_degen):
        for a in block:
            basis.append(np.outer(v[:, a], v[:, a].conj()))
            for b in block:
                if b <= a:
                    continue
                ab = np.outer(v[:, a], v[:, b].conj())
                basis.append((ab + ab.conj().T) / np.sqrt(2))
                basis.append(1j * (ab - ab.conj().T) / np.sqrt(2))
    return basis


def commutant_conditions(
    rho: DensityOperator, lindblads: LindbladSet, tol_zero: float | None = None
) -> tuple[float, bool]:
    """``max_X |Tr D(rho) X|`` over the commutant basis, and whether it vanishes."""
    d_rho = dissipator_apply(lindblads, rho)
    tol = zero_tolerance(d_rho) if tol_zero is None else tol_zero
    worst = max((abs(np.trace(d_rho @ x)) for x in commutant_basis(rho)), default=0.0)
    return float(worst), bool(worst <= tol)


def dissipative_fluxes(basis, lindblads: LindbladSet, tol: float = 1e-10) -> np.ndarray:
    """Flux matrix ``F[k, j] = <psi_k| D(|psi_j><psi_j|) |psi_k>``.

    ``basis`` holds the orthonormal states as columns.
    """
    b = np.asarray(basis, dtype=complex)
    if b.ndim != 2 or b.shape[0] != lindblads.dim:
        raise DimensionMismatch("basis vectors do not match the operator dimension")
    if np.linalg.norm(b.conj().T @ b - np.eye(b.shape[1])) > tol:
        raise NonOrthonormalBasis("basis is not orthonormal")
    n = b.shape[1]
    flux = np.zeros((n, n))
    for j in range(n):
        img = dissipator_apply(lindblads, np.outer(b[:, j], b[:, j].conj()))
        flux[:, j] = np.einsum("ik,ij,jk->k", b.conj(), img, b).real
    return flux


@dataclass(frozen=True)
class BlochFlux:
    bloch: np.ndarray
    flux: np.ndarray
    inner: float


def bloch_flux(rho: DensityOperator, lindblads: LindbladSet) -> BlochFlux:
    """Bloch vector ``r``, Bloch-picture flux ``F`` and ``r . F`` for a qubit."""
    if rho.dim != 2 or lindblads.dim != 2:
        raise WrongDimension("the Bloch flux is defined for qubits only")
    d_rho = dissipator_apply(lindblads, rho)
    r = np.array([np.trace(rho.matrix @ s).real for s in PAULI])
    f = np.array([np.trace(s @ d_rho).real for s in PAULI])
    return BlochFlux(r, f, float(r @ f))


def hamiltonian_from_dissipation(
    rho: DensityOperator, d_rho: np.ndarray, gamma: float, partition: DegeneracyPartition
) -> np.ndarray:
    """Hamiltonian cancelling ``gamma * d_rho`` between distinct eigenvalues."""
    v = rho.eigenvectors
    lam = rho.eigenvalues
    block_of = np.empty(rho.dim, dtype=int)
    for b, block in enumerate(partition.blocks):
        block_of[list(block)] = b
    in_eigenbasis = v.conj().T @ d_rho @ v
    diff = lam[:, None] - lam[None, :]
    same = block_of[:, None] == block_of[None, :]
    coeff = np.where(same, 0.0, in_eigenbasis / np.where(same, 1.0, diff))
    h = 1j * gamma * (v @ coeff @ v.conj().T)
    return 0.5 * (h + h.conj().T)


def synthesize_hamiltonian(
    rho: DensityOperator,
    lindblads: LindbladSet,
    partition: DegeneracyPartition | None = None,
    ignore_levels: Sequence[int] = (),
    tol_zero: float | None = None,
) -> np.ndarray:
    """Stabilizing Hamiltonian (hbar = 1) for a state that passes the spectral test.

    Raises:
        NotStabilizable: if any within-eigenspace residual exceeds the tolerance.
    """
    cond = spectral_conditions(rho, lindblads, partition, ignore_levels, tol_zero)
    if not cond.stabilizable:
        raise NotStabilizable(
            f"largest spectral residual {cond.max_residual:.3e} exceeds {cond.tol_zero:.3e}"
        )
    d_rho = effective_dissipation(rho, lindblads, ignore_levels)
    return hamiltonian_from_dissipation(rho, d_rho, lindblads.gamma, cond.partition)


@dataclass
class StabilizabilityReport:
    geometric_residuals: np.ndarray
    spectral_residuals: dict
    verdict: Verdict
    geometric_verdict: Verdict
    synthesized_H: np.ndarray | None
    rhs_norm: float | None
    verification_residual: float | None
    tolerances: dict

    def to_json(self) -> dict:
        from .serialize import matrix_to_json

        spectral = [
            {"i": i, "j": j, "re": v.real, "im": v.imag}
            for (i, j), v in sorted(self.spectral_residuals.items())
        ]
        return {
            "verdict": self.verdict.value,
            "geometric_verdict": self.geometric_verdict.value,
            "geometric": [float(x) for x in self.geometric_residuals],
            "spectral": spectral,
            "H": None if self.synthesized_H is None else matrix_to_json(self.synthesized_H),
            "rhs_norm": self.rhs_norm,
            "verify_residual": self.verification_residual,
            "tolerances": dict(self.tolerances),
        }


def full_report(
    rho: DensityOperator,
    lindblads: LindbladSet,
    tol_degen: float = TOL_DEGEN,
    tol_zero: float | None = None,
    ignore_levels: Sequence[int] = (),
    t_verify: float = 5.0,
    steps: int = 1000,
    partition: DegeneracyPartition | None = None,
) -> StabilizabilityReport:
    """Geometric and spectral tests, synthesis and an integration check.

    ``verdict`` is the spectral (necessary and sufficient) verdict.
    ``geometric_verdict`` records what the geometric conditions alone say:
    they are sufficient only for non-degenerate spectra, so a degenerate
    state that passes them is ``Inconclusive_Geometric``.

    The verification integrates the stabilized GKLS equation over
    ``t_verify / gamma`` with at least ``steps`` RK4 steps (more if the
    synthesized Hamiltonian is stiff).
    """
    if partition is None:
        partition = DegeneracyPartition.of(rho, tol_degen)
    cond = spectral_conditions(rho, lindblads, partition, ignore_levels, tol_zero)
    geom = geometric_conditions(rho, lindblads, ignore_levels)
    geom_pass = bool(np.abs(geom).max(initial=0.0) <= cond.tol_zero)
    if not geom_pass:
        geom_verdict = Verdict.NOT_STABILIZABLE
    elif partition.is_degenerate:
        geom_verdict = Verdict.INCONCLUSIVE_GEOMETRIC
    else:
        geom_verdict = Verdict.STABILIZABLE

    h = rhs_norm = drift = None
    if cond.stabilizable:
        verdict = Verdict.STABILIZABLE
        d_rho = effective_dissipation(rho, lindblads, ignore_levels)
        h = hamiltonian_from_dissipation(rho, d_rho, lindblads.gamma, partition)
        model = GKLSModel(lindblads, h)
        rhs_norm = float(np.linalg.norm(gkls_rhs(model, rho)))
        t = t_verify / lindblads.gamma if lindblads.gamma > 0 else t_verify
        final = evolve_auto(model, rho, t, steps)
        drift = float(np.linalg.norm(final.matrix - rho.matrix))
    else:
        verdict = Verdict.NOT_STABILIZABLE

    return StabilizabilityReport(
        geometric_residuals=geom,
        spectral_residuals=cond.residuals,
        verdict=verdict,
        geometric_verdict=geom_verdict,
        synthesized_H=h,
        rhs_norm=rhs_norm,
        verification_residual=drift,
        tolerances={
            "tol_degen": partition.tol_degen,
            "tol_zero": cond.tol_zero,
            "ignore_levels": list(ignore_levels),
        },
    )
