"""Pure target states inside noisy mixtures ``p |P><P| + (1 - p) sigma``.

Only the spectral condition attached to ``|P>`` itself is used here, which
fixes ``p`` as a function of the noise ``sigma``. The resulting value is an
upper-bound generator, not a stabilizability certificate; pass the full
mixture to :mod:`stabilizer_lab.density` for that.

Qubit 1 is the most significant tensor factor, so basis index ``b`` has qubit
``j`` (1-based) excited when bit ``N - j`` of ``b`` is set.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from itertools import combinations

import numpy as np

from .errors import DegenerateDenominator, DimensionMismatch, InvalidState, NOutOfRange
from .linalg import hermitian_eigendecomposition
from .operators import DensityOperator, LindbladSet, adjoint_dissipator_apply, dissipator_apply

N_MAX = 13
N_MAX_FULL_SPACE = 10

_LOWER = np.array([[0, 1], [0, 0]], dtype=complex)  # |0><1|


def _check_n(n: int, upper: int = N_MAX) -> None:
    if not isinstance(n, (int, np.integer)) or not 2 <= n <= upper:
        raise NOutOfRange(f"N must be an integer in [2, {upper}], got {n!r}")


def excitation_index(n: int, excited) -> int:
    """Computational-basis index of the state with the given qubits (1-based) set."""
    return sum(1 << (n - j) for j in excited)


def ghz_state(n: int) -> np.ndarray:
    _check_n(n)
    psi = np.zeros(2**n, dtype=complex)
    psi[0] = psi[-1] = 1 / np.sqrt(2)
    return psi


def w_state(n: int) -> np.ndarray:
    _check_n(n)
    psi = np.zeros(2**n, dtype=complex)
    for j in range(1, n + 1):
        psi[excitation_index(n, [j])] = 1 / np.sqrt(n)
    return psi


def dicke_two_excitation_state(n: int) -> np.ndarray:
    """Uniform superposition of all two-excitation basis states."""
    _check_n(n)
    psi = np.zeros(2**n, dtype=complex)
    for pair in combinations(range(1, n + 1), 2):
        psi[excitation_index(n, pair)] = 1.0
    return psi / np.linalg.norm(psi)


def local_damping_lindblads(n: int, gamma: float = 1.0) -> LindbladSet:
    """``L_j = |0_j><1_j|`` on each qubit, identity elsewhere (dense, N <= 10)."""
    _check_n(n, N_MAX_FULL_SPACE)
    eye = np.eye(2, dtype=complex)
    ops = []
    for j in range(n):
        factors = [eye] * n
        factors[j] = _LOWER
        ops.append(reduce(np.kron, factors))
    return LindbladSet(tuple(ops), gamma)


@dataclass(frozen=True)
class ConstituentMixture:
    target: np.ndarray
    p: float
    noise: DensityOperator

    def __post_init__(self):
        psi = np.asarray(self.target, dtype=complex)
        if abs(np.vdot(psi, psi).real - 1) > 1e-12:
            raise InvalidState("target vector is not normalized")
        if psi.shape[0] != self.noise.dim:
            raise DimensionMismatch("target and noise dimensions differ")
        if np.linalg.norm(self.noise.matrix @ psi) > 1e-10:
            raise InvalidState("noise state is not orthogonal to the target")
        if not 0 <= self.p <= 1:
            raise InvalidState("p must lie in [0, 1]")

    @property
    def state(self) -> DensityOperator:
        psi = np.asarray(self.target, dtype=complex)
        m = self.p * np.outer(psi, psi.conj()) + (1 - self.p) * self.noise.matrix
        return DensityOperator.from_matrix(m)


def diagonal_residual(target, lindblads: LindbladSet) -> float:
    """``<P| D(|P><P|) |P>``."""
    psi = np.asarray(target, dtype=complex)
    return float(np.vdot(psi, dissipator_apply(lindblads, np.outer(psi, psi.conj())) @ psi).real)


def influx_operator(target, lindblads: LindbladSet) -> np.ndarray:
    """``sum_j L_j^+ |P><P| L_j``: gives ``<P|D(sigma)|P> = Tr sigma X`` for sigma orthogonal to P."""
    psi = np.asarray(target, dtype=complex)
    proj = np.outer(psi, psi.conj())
    return sum(op.conj().T @ proj @ op for op in lindblads.operators)


class ProbabilityProbe:
    """Mixing weight zeroing the target's own spectral residual, for many noise states.

    ``p = <P|D(s)|P> / (<P|D(s)|P> - <P|D(|P><P|)|P>)`` with ``s`` the noise.
    The influx term is evaluated through the adjoint dissipator as
    ``Tr[s D~(|P><P|)]``; ``D~(|P><P|)`` is computed once per target.
    """

    def __init__(self, target, lindblads: LindbladSet, tol: float = 1e-10):
        self.target = np.asarray(target, dtype=complex)
        if self.target.shape[0] != lindblads.dim:
            raise DimensionMismatch("target and operators must share one dimension")
        self.tol = tol
        self._adj = adjoint_dissipator_apply(lindblads, np.outer(self.target, self.target.conj()))
        self._own = float(np.vdot(self.target, self._adj @ self.target).real)

    def __call__(self, noise: DensityOperator) -> float:
        """Raises DegenerateDenominator when both terms vanish."""
        if noise.dim != self.target.shape[0]:
            raise DimensionMismatch("target and noise must share one dimension")
        if np.linalg.norm(noise.matrix @ self.target) > self.tol:
            raise InvalidState("noise state is not orthogonal to the target")
        influx = float(np.vdot(self._adj.conj(), noise.matrix).real)  # Tr[s X] for Hermitian X
        denom = influx - self._own
        if abs(denom) <= 1e-14:
            raise DegenerateDenominator("both the influx and the self term vanish")
        return influx / denom


def constituent_probability(target, noise: DensityOperator, lindblads: LindbladSet, tol: float = 1e-10) -> float:
    """One-off :class:`ProbabilityProbe` evaluation."""
    return ProbabilityProbe(target, lindblads, tol)(noise)


def _normalized_residual(target, lindblads: LindbladSet) -> float:
    scale = float(np.trace(influx_operator(target, lindblads)).real)
    return diagonal_residual(target, lindblads) / scale


def ghz_diagonal_residual(n: int, normalized: bool = True) -> float:
    """Self residual of the GHZ state under local damping.

    With ``normalized=True`` the residual is divided by the trace of the
    influx operator (``N / 2``), which is the scale where the influx equals
    ``Tr sigma chi`` with unit-trace ``chi``; the value is then ``-1`` for
    every N. The raw matrix element is ``-N / 2``.
    """
    _check_n(n, N_MAX_FULL_SPACE)
    lind = local_damping_lindblads(n)
    psi = ghz_state(n)
    return _normalized_residual(psi, lind) if normalized else diagonal_residual(psi, lind)


def w_diagonal_residual(n: int, normalized: bool = True) -> float:
    """Self residual of the W state under local damping.

    Normalized by the influx trace ``N - 1`` (so the influx equals
    ``Tr sigma zeta``) it is ``-1 / (N - 1)``; the raw element is ``-1``.
    """
    _check_n(n, N_MAX_FULL_SPACE)
    lind = local_damping_lindblads(n)
    psi = w_state(n)
    return _normalized_residual(psi, lind) if normalized else diagonal_residual(psi, lind)


def chi_operator(n: int) -> np.ndarray:
    """``chi = (1/N) sum_j |e_j><e_j|`` over single-excitation states (full space)."""
    _check_n(n, N_MAX_FULL_SPACE)
    chi = np.zeros((2**n, 2**n), dtype=complex)
    for j in range(1, n + 1):
        k = excitation_index(n, [j])
        chi[k, k] = 1.0 / n
    return chi


def chi_spectrum(n: int) -> np.ndarray:
    """Nonzero eigenvalues of ``chi`` from its single-excitation block."""
    _check_n(n)
    block = np.eye(n) / n
    return np.linalg.eigvalsh(block)[::-1]


def zeta_vectors(n: int) -> tuple[list, np.ndarray]:
    """Two-excitation basis (pairs) and the ``|zeta_j>`` as columns in that basis."""
    _check_n(n)
    pairs = list(combinations(range(1, n + 1), 2))
    cols = np.zeros((len(pairs), n))
    for row, (a, b) in enumerate(pairs):
        cols[row, a - 1] = cols[row, b - 1] = 1.0 / np.sqrt(n - 1)
    return pairs, cols


def zeta_gram(n: int) -> np.ndarray:
    """Gram matrix ``<zeta_j|zeta_k>`` computed from the explicit supports."""
    _check_n(n)
    supports = [
        {frozenset((j, k)) for k in range(1, n + 1) if k != j} for j in range(1, n + 1)
    ]
    gram = np.empty((n, n))
    for a in range(n):
        for b in range(n):
            gram[a, b] = len(supports[a] & supports[b]) / (n - 1)
    return gram


def zeta_spectrum(n: int) -> np.ndarray:
    """Nonzero part of the spectrum of ``zeta`` via the N x N Gram reduction.

    ``zeta = (1/N) A A^+`` with the ``|zeta_j>`` as columns of ``A``, and
    ``A A^+`` shares its nonzero eigenvalues with ``A^+ A``. Returns all N Gram
    eigenvalues divided by N, descending (for N = 2 one of them is zero).
    """
    return np.linalg.eigvalsh(zeta_gram(n))[::-1] / n


def zeta_spectrum_subspace(n: int) -> np.ndarray:
    """Spectrum of ``zeta`` diagonalized in the C(N, 2)-dimensional subspace."""
    _check_n(n, N_MAX_FULL_SPACE)
    _, cols = zeta_vectors(n)
    zeta = cols @ cols.T / n
    return np.linalg.eigvalsh(zeta)[::-1]


def zeta_operator(n: int) -> np.ndarray:
    """``zeta`` embedded in the full 2^N space (N <= 10)."""
    _check_n(n, N_MAX_FULL_SPACE)
    pairs, cols = zeta_vectors(n)
    idx = [excitation_index(n, p) for p in pairs]
    full = np.zeros((2**n, 2**n), dtype=complex)
    full[np.ix_(idx, idx)] = cols @ cols.T / n
    return full


def expected_zeta_spectrum(n: int) -> np.ndarray:
    return np.array([2.0 / n] + [(n - 2) / (n * (n - 1))] * (n - 1))


def ghz_bound(n: int) -> float:
    _check_n(n)
    return 1.0 / (n + 1)


def w_bound(n: int) -> float:
    _check_n(n)
    return (2.0 * n - 2.0) / (3.0 * n - 2.0)


def certify_ghz_bound(n: int) -> bool:
    x = chi_spectrum(n).max()
    return bool(abs(x / (1 + x) - ghz_bound(n)) <= 1e-12)


def certify_w_bound(n: int) -> bool:
    spec = zeta_spectrum(n)
    ok = np.allclose(spec, expected_zeta_spectrum(n), atol=1e-12, rtol=0)
    x = spec.max()
    return bool(ok and abs(x / (1 / (n - 1) + x) - w_bound(n)) <= 1e-12)


def bounds_table(family: str, n_min: int, n_max: int) -> list[dict]:
    """Rows ``N, ghz_bound, w_bound, zeta_max, certified`` for a bound family."""
    if family not in ("ghz", "w"):
        raise ValueError(f"unknown family {family!r}")
    if not 2 <= n_min <= n_max <= N_MAX:
        raise NOutOfRange(f"need 2 <= n_min <= n_max <= {N_MAX}")
    rows = []
    for n in range(n_min, n_max + 1):
        zeta_max = float(zeta_spectrum(n).max())
        certified = certify_ghz_bound(n) if family == "ghz" else certify_w_bound(n)
        rows.append(
            {
                "N": n,
                "ghz_bound": ghz_bound(n),
                "w_bound": w_bound(n),
                "zeta_max": zeta_max,
                "certified": certified,
            }
        )
    return rows


def fidelity(rho, psi) -> float:
    """``<psi|rho|psi> / <psi|psi>``; ``psi`` need not be normalized."""
    m = rho.matrix if isinstance(rho, DensityOperator) else np.asarray(rho, dtype=complex)
    psi = np.asarray(psi, dtype=complex)
    if m.shape != (psi.shape[0],) * 2:
        raise DimensionMismatch("state and vector dimensions differ")
    return float(np.vdot(psi, m @ psi).real / np.vdot(psi, psi).real)


GOLDEN_RATIO = (1 + np.sqrt(5)) / 2


def rho_fid() -> DensityOperator:
    """Two-qubit state with the largest stabilizable Bell-state fidelity under local damping."""
    phi = GOLDEN_RATIO
    m = 0.25 * np.eye(4, dtype=complex)
    m[0, 0] += phi**2
    m[0, 3] += phi / 2
    m[3, 0] += phi / 2
    return DensityOperator.from_matrix(m / (1 + phi**2))


def eigenvector_defect(rho: DensityOperator, psi) -> float:
    """``|| rho psi - <psi|rho|psi> psi ||`` for normalized ``psi``; zero iff ``psi`` is an eigenvector."""
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return float(np.linalg.norm(rho.matrix @ psi - fidelity(rho, psi) * psi))


def orthogonal_noise(target, rng: np.random.Generator, rank: int | None = None) -> DensityOperator:
    """Random density operator supported on the complement of ``target``."""
    psi = np.asarray(target, dtype=complex)
    d = psi.shape[0]
    k = d if rank is None else rank
    a = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    a = a - np.outer(psi, psi.conj() @ a)
    m = a @ a.conj().T
    m = 0.5 * (m + m.conj().T)
    return DensityOperator.from_matrix(m / np.trace(m).real)


def top_eigenvalue(op: np.ndarray) -> float:
    return float(hermitian_eigendecomposition(op)[0][0])
