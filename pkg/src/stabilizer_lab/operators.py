"""Density operators, Lindblad dissipators and the GKLS equation (hbar = 1)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, InvalidState, NonPhysicalDrift
from .linalg import as_complex_matrix, hermitian_eigendecomposition, rk4_step, stable_step_count

MAX_DIM = 4096


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Hermitian, unit-trace, positive semidefinite matrix with its eigensystem.

    The eigenvectors (columns of ``eigenvectors``) are ordered by descending
    eigenvalue. Within a degenerate eigenspace the basis is a free choice;
    :meth:`with_basis` swaps in a different orthonormal eigenbasis.
    """

    matrix: np.ndarray
    eigenvalues: np.ndarray = field(repr=False)
    eigenvectors: np.ndarray = field(repr=False)

    @classmethod
    def from_matrix(cls, matrix, psd_tol: float = 1e-12) -> "DensityOperator":
        m = as_complex_matrix(matrix)
        d = m.shape[0]
        if m.shape != (d, d):
            raise InvalidState(f"density matrix must be square, got {m.shape}")
        if d > MAX_DIM:
            raise InvalidState(f"dimension {d} exceeds the dense cap {MAX_DIM}")
        norm = np.linalg.norm(m)
        if np.linalg.norm(m - m.conj().T) > 1e-12 * max(norm, 1e-300):
            raise InvalidState("density matrix is not Hermitian")
        m = 0.5 * (m + m.conj().T)
        if abs(np.trace(m).real - 1.0) > 1e-12:
            raise InvalidState(f"trace {np.trace(m).real!r} differs from 1")
        w, v = hermitian_eigendecomposition(m)
        if w.min() < -psd_tol:
            raise InvalidState(f"negative eigenvalue {w.min():.3e}")
        m.setflags(write=False)
        w.setflags(write=False)
        v.setflags(write=False)
        return cls(m, w, v)

    @classmethod
    def from_spectrum(cls, eigenvalues, eigenvectors) -> "DensityOperator":
        """Build ``sum_l lambda_l |psi_l><psi_l|`` keeping the given eigenbasis."""
        w = np.asarray(eigenvalues, dtype=float)
        v = as_complex_matrix(eigenvectors)
        m = (v * w) @ v.conj().T
        base = cls.from_matrix(m)
        return base.with_basis(w, v)

    @classmethod
    def pure(cls, psi) -> "DensityOperator":
        psi = np.asarray(psi, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return cls.from_matrix(np.outer(psi, psi.conj()))

    def with_basis(self, eigenvalues, eigenvectors, tol: float = 1e-10) -> "DensityOperator":
        """Return a copy using another orthonormal eigenbasis of the same matrix."""
        w = np.array(eigenvalues, dtype=float)
        v = np.array(eigenvectors, dtype=complex)
        d = self.dim
        if v.shape != (d, d) or w.shape != (d,):
            raise DimensionMismatch("eigenbasis has the wrong shape")
        if np.linalg.norm(v.conj().T @ v - np.eye(d)) > tol:
            raise InvalidState("eigenvectors are not orthonormal")
        resid = self.matrix @ v - v * w
        if np.linalg.norm(resid) > tol * max(1.0, np.linalg.norm(self.matrix)):
            raise InvalidState("supplied vectors are not eigenvectors of the matrix")
        order = np.argsort(-w, kind="stable")
        w, v = w[order], v[:, order]
        w.setflags(write=False)
        v.setflags(write=False)
        return DensityOperator(self.matrix, w, v)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class LindbladSet:
    """Jump operators ``L_j`` sharing the dissipation rate ``gamma``."""

    operators: tuple
    gamma: float = 1.0

    def __post_init__(self):
        ops = tuple(as_complex_matrix(op) for op in self.operators)
        if not ops:
            raise DimensionMismatch("a Lindblad set needs at least one operator")
        d = ops[0].shape[0]
        for op in ops:
            if op.shape != (d, d):
                raise DimensionMismatch(f"operator of shape {op.shape} in a {d}-dimensional set")
        if not self.gamma >= 0:
            raise ValueError("gamma must be non-negative")
        object.__setattr__(self, "operators", ops)

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]

    def stacked(self) -> np.ndarray:
        return np.stack(self.operators)

    def transformed(self, u) -> "LindbladSet":
        u = np.asarray(u, dtype=complex)
        return LindbladSet(tuple(u @ op @ u.conj().T for op in self.operators), self.gamma)


@dataclass(frozen=True, eq=False)
class GKLSModel:
    lindblads: LindbladSet
    hamiltonian: np.ndarray | None = None

    def __post_init__(self):
        if self.hamiltonian is not None:
            h = as_complex_matrix(self.hamiltonian)
            if h.shape != (self.lindblads.dim,) * 2:
                raise DimensionMismatch("Hamiltonian and Lindblad operators differ in dimension")
            if np.linalg.norm(h - h.conj().T) > 1e-12 * max(1.0, np.linalg.norm(h)):
                raise ValueError("Hamiltonian is not Hermitian")
            object.__setattr__(self, "hamiltonian", 0.5 * (h + h.conj().T))

    @property
    def dim(self) -> int:
        return self.lindblads.dim


def _matrix_of(rho) -> np.ndarray:
    if isinstance(rho, DensityOperator):
        return rho.matrix
    return as_complex_matrix(rho)


def _check_dims(lindblads: LindbladSet, m: np.ndarray) -> None:
    if m.shape != (lindblads.dim, lindblads.dim):
        raise DimensionMismatch(f"state of shape {m.shape} vs operators of dimension {lindblads.dim}")


def dissipator_apply(lindblads: LindbladSet, rho) -> np.ndarray:
    """``D(rho) = sum_j L_j rho L_j^+ - 1/2 {L_j^+ L_j, rho}`` (rate not included)."""
    m = _matrix_of(rho)
    _check_dims(lindblads, m)
    out = np.zeros_like(m)
    for op in lindblads.operators:
        opd = op.conj().T
        ldl = opd @ op
        out += op @ m @ opd - 0.5 * (ldl @ m + m @ ldl)
    return out


def adjoint_dissipator_apply(lindblads: LindbladSet, x) -> np.ndarray:
    """Hilbert-Schmidt adjoint of :func:`dissipator_apply`."""
    m = _matrix_of(x)
    _check_dims(lindblads, m)
    out = np.zeros_like(m)
    for op in lindblads.operators:
        opd = op.conj().T
        ldl = opd @ op
        out += opd @ m @ op - 0.5 * (ldl @ m + m @ ldl)
    return out


def gkls_rhs(model: GKLSModel, rho) -> np.ndarray:
    m = _matrix_of(rho)
    _check_dims(model.lindblads, m)
    out = model.lindblads.gamma * dissipator_apply(model.lindblads, m)
    if model.hamiltonian is not None:
        h = model.hamiltonian
        out += -1j * (h @ m - m @ h)
    return out


def generator_norm_bound(model: GKLSModel) -> float:
    """Cheap upper bound on the operator norm of the GKLS generator."""
    bound = 0.0
    if model.hamiltonian is not None:
        bound += 2 * np.linalg.norm(model.hamiltonian, 2)
    bound += model.lindblads.gamma * sum(2 * np.linalg.norm(op, 2) ** 2 for op in model.lindblads.operators)
    return bound


def evolve_fixed_step(model: GKLSModel, rho0, t_final: float, steps: int) -> DensityOperator:
    """Classical RK4 integration of the GKLS equation with a fixed step.

    After every step the state is re-Hermitized and renormalized to unit trace.

    Raises:
        NonPhysicalDrift: if an eigenvalue drops below ``-1e-6``.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if t_final < 0:
        raise ValueError("t_final must be >= 0")
    m = _matrix_of(rho0).copy()
    _check_dims(model.lindblads, m)
    h = t_final / steps
    f = lambda y: gkls_rhs(model, y)  # noqa: E731
    for _ in range(steps):
        m = rk4_step(f, m, h)
        m = 0.5 * (m + m.conj().T)
        m = m / np.trace(m).real
        lo = np.linalg.eigvalsh(m).min()
        if lo < -1e-6:
            raise NonPhysicalDrift(f"eigenvalue {lo:.3e} during evolution")
    return DensityOperator.from_matrix(m, psd_tol=1e-6)


def evolve_auto(model: GKLSModel, rho0, t_final: float, min_steps: int = 1000) -> DensityOperator:
    """:func:`evolve_fixed_step` with a step count that keeps RK4 stable."""
    steps = stable_step_count(t_final, generator_norm_bound(model), min_steps)
    return evolve_fixed_step(model, rho0, t_final, steps)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_density(d: int, rng: np.random.Generator, rank: int | None = None) -> DensityOperator:
    k = d if rank is None else rank
    a = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    m = a @ a.conj().T
    return DensityOperator.from_matrix(m / np.trace(m).real)


def random_lindblads(d: int, count: int, rng: np.random.Generator, gamma: float = 1.0) -> LindbladSet:
    ops = [(rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2 * d) for _ in range(count)]
    return LindbladSet(tuple(ops), gamma)


def annihilation(d: int) -> np.ndarray:
    """Truncated bosonic annihilation operator on levels ``0..d-1``."""
    return np.diag(np.sqrt(np.arange(1, d)), 1).astype(complex)


def basis_vector(d: int, k: int) -> np.ndarray:
    e = np.zeros(d, dtype=complex)
    e[k] = 1.0
    return e


def liouvillian(model: GKLSModel) -> np.ndarray:
    """Superoperator matrix of :func:`gkls_rhs` acting on row-major ``vec(rho)``."""
    d = model.dim
    eye = np.eye(d)
    sup = np.zeros((d * d, d * d), dtype=complex)
    if model.hamiltonian is not None:
        h = model.hamiltonian
        sup += -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    g = model.lindblads.gamma
    for op in model.lindblads.operators:
        ldl = op.conj().T @ op
        sup += g * (np.kron(op, op.conj()) - 0.5 * np.kron(ldl, eye) - 0.5 * np.kron(eye, ldl.T))
    return sup


def steady_state(model: GKLSModel) -> DensityOperator:
    """Stationary state of a GKLS model with a one-dimensional kernel."""
    d = model.dim
    _, s, vh = np.linalg.svd(liouvillian(model))
    vec = vh[-1].conj()
    m = vec.reshape(d, d)
    m = m / np.trace(m)
    m = 0.5 * (m + m.conj().T)
    return DensityOperator.from_matrix(m / np.trace(m).real, psd_tol=1e-9)
