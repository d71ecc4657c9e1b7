"""Covariance-matrix (symplectic) picture of Gaussian states.

Quadratures are ordered ``(x_1, p_1, ..., x_N, p_N)`` and ``hbar = 1``, so the
vacuum has ``V = 1/2``. First moments are assumed to vanish.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import (
    DefectivePairing,
    DimensionMismatch,
    InvalidSpectrum,
    NotSymplectic,
    SingularCovariance,
)
from .linalg import fix_phase, spd_sqrt  # noqa: F401  (spd_sqrt is part of this module's API)

SYMPLECTIC_TOL = 1e-10
VALIDITY_TOL = 1e-10
PAIRING_TOL = 1e-9

J2 = np.array([[0.0, 1.0], [-1.0, 0.0]])
ETA2 = np.diag([1.0, -1.0])
I2 = np.eye(2)




def symplectic_form(n: int) -> np.ndarray:
    if n < 1:
        raise ValueError("need at least one mode")
    return np.kron(np.eye(n), J2)


@dataclass(frozen=True, eq=False)
class SymplecticMatrix:
    K: np.ndarray

    def __post_init__(self):
        k = np.asarray(self.K, dtype=float)
        if k.ndim != 2 or k.shape[0] != k.shape[1] or k.shape[0] % 2:
            raise DimensionMismatch(f"symplectic matrices are 2N x 2N, got {k.shape}")
        object.__setattr__(self, "K", k)

    @property
    def modes(self) -> int:
        return self.K.shape[0] // 2

    @property
    def defect(self) -> float:
        """``|| K J K^T - J ||_F``."""
        j = symplectic_form(self.modes)
        return float(np.linalg.norm(self.K @ j @ self.K.T - j))

    def require(self) -> "SymplecticMatrix":
        if self.defect > SYMPLECTIC_TOL:
            raise NotSymplectic(f"K J K^T deviates from J by {self.defect:.3e}")
        return self


def channel_K1(mu: float) -> SymplecticMatrix:
    """Phase conjugation / transposition channel."""
    s, c = np.sinh(mu), np.cosh(mu)
    return SymplecticMatrix(np.block([[s * ETA2, c * I2], [c * I2, s * ETA2]])).require()


def channel_K2(theta: float) -> SymplecticMatrix:
    """Beamsplitter / attenuator channel."""
    s, c = np.sin(theta), np.cos(theta)
    return SymplecticMatrix(np.block([[c * I2, -s * I2], [s * I2, c * I2]])).require()


def channel_K3(delta: float) -> SymplecticMatrix:
    """Amplifier channel."""
    s, c = np.sinh(delta), np.cosh(delta)
    return SymplecticMatrix(np.block([[c * I2, s * ETA2], [s * ETA2, c * I2]])).require()


@dataclass(frozen=True, eq=False)
class CovarianceMatrix:
    V: np.ndarray

    def __post_init__(self):
        v = np.array(self.V, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1] or v.shape[0] % 2:
            raise DimensionMismatch(f"covariance matrices are 2N x 2N, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("covariance matrix has non-finite entries")
        if np.linalg.norm(v - v.T) > 1e-12 * max(1.0, np.linalg.norm(v)):
            raise ValueError("covariance matrix is not symmetric")
        v = 0.5 * (v + v.T)
        v.setflags(write=False)
        object.__setattr__(self, "V", v)

    @property
    def modes(self) -> int:
        return self.V.shape[0] // 2

    @cached_property
    def is_valid(self) -> bool:
        """Heisenberg condition ``V + i J / 2 >= 0``."""
        j = symplectic_form(self.modes)
        return bool(np.linalg.eigvalsh(self.V + 0.5j * j).min() >= -VALIDITY_TOL)

    @cached_property
    def symplectic_eigenvalues(self) -> np.ndarray:
        return symplectic_eigenvalues(self.V)

    @cached_property
    def eigendata(self) -> "SymplecticEigendata":
        return symplectic_eigendata(self.V)


def standard_form(a: float, b: float, c_plus: float, c_minus: float) -> CovarianceMatrix:
    """Two-mode standard form; validity is evaluated, not assumed."""
    if not (a > 0 and b > 0):
        raise ValueError("a and b must be positive")
    return CovarianceMatrix(
        np.array(
            [
                [a, 0, c_plus, 0],
                [0, a, 0, c_minus],
                [c_plus, 0, b, 0],
                [0, c_minus, 0, b],
            ],
            dtype=float,
        )
    )


def squeezed_thermal(nu1: float, nu2: float, r: float) -> CovarianceMatrix:
    """Two-mode squeezed thermal state with symplectic eigenvalues ``nu1, nu2``."""
    if nu1 < 0.5 - 1e-12 or nu2 < 0.5 - 1e-12 or r < 0:
        raise InvalidSpectrum(f"need nu >= 1/2 and r >= 0, got nu=({nu1}, {nu2}), r={r}")
    ch2, sh2 = np.cosh(r) ** 2, np.sinh(r) ** 2
    a = nu1 * ch2 + nu2 * sh2
    b = nu1 * sh2 + nu2 * ch2
    c = 0.5 * (nu1 + nu2) * np.sinh(2 * r)
    return standard_form(a, b, c, -c)


def symplectic_eigenvalues(v) -> np.ndarray:
    """Ascending symplectic eigenvalues from the eigenvalues of ``J V``.

    Raises:
        DefectivePairing: if the eigenvalues are not (numerically) purely
            imaginary conjugate pairs.
    """
    v = np.asarray(v, dtype=float)
    n = v.shape[0] // 2
    z = np.linalg.eigvals(symplectic_form(n) @ v)
    tol = PAIRING_TOL * max(1.0, float(np.linalg.norm(v)))
    if np.abs(z.real).max() > tol:
        raise DefectivePairing(f"J V has eigenvalues with real part {np.abs(z.real).max():.3e}")
    upper = np.sort(z.imag[z.imag > 0])
    lower = np.sort(-z.imag[z.imag < 0])
    if len(upper) != n or len(lower) != n or np.abs(upper - lower).max() > tol:
        raise DefectivePairing("eigenvalues of J V are not closed under conjugation")
    return 0.5 * (upper + lower)


@dataclass(frozen=True, eq=False)
class SymplecticEigendata:
    """Eigen-pairs of ``J V``: ``z[l]`` with eigenvectors ``zeta[:, l]``.

    Ordered ``(+i nu_1, -i nu_1, +i nu_2, -i nu_2, ...)`` with ``nu`` ascending.
    ``w`` holds the orthonormal eigenvectors of ``sqrt(V) J sqrt(V)`` (same
    eigenvalues) and ``zeta = sqrt(V)^-1 w`` normalized to unit length.
    """

    nu: np.ndarray
    z: np.ndarray
    zeta: np.ndarray = field(repr=False)
    w: np.ndarray = field(repr=False)
    sqrt_v: np.ndarray = field(repr=False)


def symplectic_eigendata(v) -> SymplecticEigendata:
    """Eigen-decomposition of ``J V`` for an invertible covariance matrix.

    The eigenvectors are obtained through the normal matrix
    ``sqrt(V) J sqrt(V)`` (``i`` times it is Hermitian), which keeps degenerate
    eigenspaces well conditioned; conjugate pairing is certified against a
    direct eigen-solve of ``J V``.

    Raises:
        SingularCovariance: if ``|det V| <= 1e-12``.
        NotPositiveDefinite: if ``V`` is invertible but not positive definite.
        DefectivePairing: see :func:`symplectic_eigenvalues`.
    """
    v = np.asarray(v, dtype=float)
    n = v.shape[0] // 2
    if abs(np.linalg.det(v)) <= 1e-12:
        raise SingularCovariance("covariance matrix is not invertible")
    nu_direct = symplectic_eigenvalues(v)
    s = spd_sqrt(v)
    j = symplectic_form(n)
    big_v = s @ j @ s
    mu, w = np.linalg.eigh(1j * big_v)
    # i * big_v * w = mu * w  =>  big_v w = -i mu w
    z_all = -1j * mu
    order = []
    used = np.zeros(2 * n, dtype=bool)
    for target in nu_direct:
        for sign in (1, -1):
            cand = np.where(~used)[0]
            k = cand[np.argmin(np.abs(z_all[cand] - sign * 1j * target))]
            used[k] = True
            order.append(k)
    z = z_all[order]
    w = w[:, order]
    zeta = np.linalg.solve(s, w)
    zeta = zeta / np.linalg.norm(zeta, axis=0)
    for k in range(2 * n):
        zeta[:, k] = fix_phase(zeta[:, k])
    tol = PAIRING_TOL * max(1.0, float(np.linalg.norm(v)))
    if np.abs(np.abs(z.imag[::2]) - nu_direct).max() > tol:
        raise DefectivePairing("eigenvalues from J V and sqrt(V) J sqrt(V) disagree")
    return SymplecticEigendata(nu_direct, z, zeta, w, s)


@dataclass(frozen=True, eq=False)
class LinearLindbladSpec:
    """Linear jump operators ``L_j = c_j . xi``; row ``j`` of ``C`` is ``c_j``."""

    C: np.ndarray

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.C, dtype=complex))
        if c.shape[1] % 2:
            raise DimensionMismatch("C needs an even number of columns (2N)")
        object.__setattr__(self, "C", c)

    @property
    def modes(self) -> int:
        return self.C.shape[1] // 2

    @cached_property
    def gram(self) -> np.ndarray:
        return self.C.conj().T @ self.C

    @property
    def re(self) -> np.ndarray:
        return self.gram.real

    @property
    def im(self) -> np.ndarray:
        return self.gram.imag


def ladder_row(n: int, terms) -> np.ndarray:
    """Coefficient row for ``sum coef * a_k`` / ``coef * a_k^+`` in quadratures.

    ``terms`` is an iterable of ``(coef, mode, dagger)`` with 1-based modes and
    ``a_k = (x_k + i p_k) / sqrt(2)``.
    """
    row = np.zeros(2 * n, dtype=complex)
    for coef, mode, dagger in terms:
        sign = -1 if dagger else 1
        row[2 * (mode - 1)] += coef / np.sqrt(2)
        row[2 * (mode - 1) + 1] += sign * 1j * coef / np.sqrt(2)
    return row


def model_local_damping() -> LinearLindbladSpec:
    """Model i: ``L_1 = a_1``, ``L_2 = a_2``."""
    return LinearLindbladSpec(np.array([ladder_row(2, [(1, 1, False)]), ladder_row(2, [(1, 2, False)])]))


def model_global_damping() -> LinearLindbladSpec:
    """Model ii: ``L = a_1 + a_2``."""
    return LinearLindbladSpec(np.array([ladder_row(2, [(1, 1, False), (1, 2, False)])]))


def model_engineered_squeezing(alpha: float) -> LinearLindbladSpec:
    """Model iii: jump operators whose dark state is two-mode squeezed with strength ``alpha``."""
    ch, sh = np.cosh(alpha), np.sinh(alpha)
    return LinearLindbladSpec(
        np.array(
            [
                ladder_row(2, [(ch, 1, False), (-sh, 2, True)]),
                ladder_row(2, [(ch, 2, False), (-sh, 1, True)]),
            ]
        )
    )


def linear_model(name: str, alpha: float | None = None) -> LinearLindbladSpec:
    from .errors import MissingAlpha

    if name == "i":
        return model_local_damping()
    if name == "ii":
        return model_global_damping()
    if name == "iii":
        if alpha is None:
            raise MissingAlpha("model iii needs the squeezing parameter alpha")
        return model_engineered_squeezing(alpha)
    raise ValueError(f"unknown linear model {name!r}")


@dataclass(frozen=True, eq=False)
class UnitaryChannelSpec:
    """Weighted symplectic channels ``(kappa_j, K_j)`` with ``sum kappa_j = 1``."""

    channels: tuple

    def __post_init__(self):
        chans = tuple((float(k), K if isinstance(K, SymplecticMatrix) else SymplecticMatrix(K)) for k, K in self.channels)
        if not chans:
            raise ValueError("need at least one channel")
        if any(k < 0 for k, _ in chans):
            raise ValueError("channel weights must be non-negative")
        if abs(sum(k for k, _ in chans) - 1.0) > 1e-12:
            raise ValueError("channel weights must sum to 1")
        sizes = {K.K.shape for _, K in chans}
        if len(sizes) != 1:
            raise DimensionMismatch("channels act on different mode numbers")
        for _, K in chans:
            K.require()
        object.__setattr__(self, "channels", chans)

    @property
    def modes(self) -> int:
        return self.channels[0][1].modes


@dataclass(frozen=True, eq=False)
class GaussianDissipatorSpec:
    gamma_L: float = 0.0
    linear: LinearLindbladSpec | None = None
    gamma_U: float = 0.0
    unitary: UnitaryChannelSpec | None = None

    def __post_init__(self):
        if self.linear is None and self.unitary is None:
            raise ValueError("a dissipator needs a linear or a unitary part")
        if self.gamma_L < 0 or self.gamma_U < 0:
            raise ValueError("rates must be non-negative")
        if self.linear is not None and self.unitary is not None and self.linear.modes != self.unitary.modes:
            raise DimensionMismatch("linear and unitary parts act on different mode numbers")

    @property
    def modes(self) -> int:
        return (self.linear or self.unitary).modes


def _check_modes(spec_modes: int, v: np.ndarray) -> None:
    if v.shape != (2 * spec_modes, 2 * spec_modes):
        raise DimensionMismatch(f"matrix of shape {v.shape} for a {spec_modes}-mode dissipator")


def dissipator_linear(spec: LinearLindbladSpec, v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    _check_modes(spec.modes, v)
    j = symplectic_form(spec.modes)
    im, re = spec.im, spec.re
    out = j @ im @ v + v @ im @ j - j @ re @ j
    return 0.5 * (out + out.T)


def dissipator_unitary(spec: UnitaryChannelSpec, v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    _check_modes(spec.modes, v)
    out = sum(k * (K.K @ v @ K.K.T - v) for k, K in spec.channels)
    return 0.5 * (out + out.T)


def dissipator(spec: GaussianDissipatorSpec, v) -> np.ndarray:
    """Rate-weighted covariance dissipator ``gamma_L D_L(V) + gamma_U D_U(V)``."""
    v = np.asarray(v, dtype=float)
    out = np.zeros_like(v)
    if spec.linear is not None:
        out += spec.gamma_L * dissipator_linear(spec.linear, v)
    if spec.unitary is not None:
        out += spec.gamma_U * dissipator_unitary(spec.unitary, v)
    return out


def tilde_dissipator(spec: GaussianDissipatorSpec, v_tilde) -> np.ndarray:
    """Dissipator acting on ``V~ = J V`` (rate-weighted)."""
    vt = np.asarray(v_tilde, dtype=float)
    _check_modes(spec.modes, vt)
    j = symplectic_form(spec.modes)
    out = np.zeros_like(vt)
    if spec.linear is not None:
        imj = spec.linear.im @ j
        out += spec.gamma_L * (imj @ vt + vt @ imj + spec.linear.re @ j)
    if spec.unitary is not None:
        for k, K in spec.unitary.channels:
            kt = j @ K.K @ j.T
            out += spec.gamma_U * k * (kt @ vt @ np.linalg.inv(kt) - vt)
    return out
