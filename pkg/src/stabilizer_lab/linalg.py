"""Dense linear-algebra helpers shared by the density and covariance code."""

from __future__ import annotations

from typing import Callable

import numpy as np

from .errors import ConvergenceFailure, NonHermitianInput, NotPositiveDefinite

HERMITIAN_RTOL = 1e-10


def as_complex_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"expected a non-empty 2-d matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def fix_phase(v: np.ndarray) -> np.ndarray:
    """Scale ``v`` so that its largest-magnitude entry is real and positive.

    Ties in magnitude go to the lowest index (``argmax`` semantics after
    rounding magnitudes to 12 digits, so numerically-equal entries tie).
    """
    mags = np.round(np.abs(v), 12)
    k = int(np.argmax(mags))
    if np.abs(v[k]) == 0:
        return v
    return v * (np.abs(v[k]) / v[k])


def hermitian_eigendecomposition(
    a, tol_tie: float = 1e-12
) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decompose a Hermitian matrix.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues in descending
    order and eigenvectors as the *columns* of the second array. Every column
    is phase-fixed with :func:`fix_phase`; eigenvalues equal within
    ``tol_tie`` are ordered lexicographically by the index of their dominant
    entry, then by the real parts of their entries (descending).

    Raises:
        NonHermitianInput: if ``a`` deviates from ``a^dagger`` by more than
            ``1e-10`` relative (Frobenius).
        ConvergenceFailure: if LAPACK fails to converge.
    """
    m = as_complex_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise NonHermitianInput(f"matrix is not square: {m.shape}")
    scale = max(1.0, np.linalg.norm(m))
    if np.linalg.norm(m - m.conj().T) > HERMITIAN_RTOL * scale:
        raise NonHermitianInput("matrix is not Hermitian")
    m = 0.5 * (m + m.conj().T)
    try:
        w, v = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise ConvergenceFailure(str(exc)) from exc
    w = w[::-1].copy()
    v = v[:, ::-1].copy()
    for k in range(v.shape[1]):
        v[:, k] = fix_phase(v[:, k])

    # deterministic order within numerically-tied eigenvalues
    order = list(range(len(w)))
    start = 0
    while start < len(w):
        stop = start + 1
        while stop < len(w) and abs(w[stop] - w[start]) <= tol_tie * max(1.0, abs(w[start])):
            stop += 1
        if stop - start > 1:
            block = order[start:stop]
            block.sort(key=lambda c: _tie_key(v[:, c]))
            order[start:stop] = block
        start = stop
    return w[order], v[:, order]


def _tie_key(vec: np.ndarray):
    lead = int(np.argmax(np.round(np.abs(vec), 12)))
    return (lead, tuple(-np.round(vec.real, 12)), tuple(-np.round(vec.imag, 12)))


def spd_sqrt(v) -> np.ndarray:
    """Symmetric square root of a real symmetric positive-definite matrix."""
    m = np.asarray(v, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotPositiveDefinite(f"expected a square matrix, got {m.shape}")
    if np.linalg.norm(m - m.T) > 1e-12 * max(1.0, np.linalg.norm(m)):
        raise NotPositiveDefinite("matrix is not symmetric")
    w, u = np.linalg.eigh(0.5 * (m + m.T))
    if w.min() <= 0:
        raise NotPositiveDefinite(f"smallest eigenvalue {w.min():.3e} is not positive")
    s = (u * np.sqrt(w)) @ u.T
    return 0.5 * (s + s.T)


def rk4_step(f: Callable[[np.ndarray], np.ndarray], y: np.ndarray, h: float) -> np.ndarray:
    k1 = f(y)
    k2 = f(y + 0.5 * h * k1)
    k3 = f(y + 0.5 * h * k2)
    k4 = f(y + h * k3)
    return y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def stable_step_count(t_final: float, rate_bound: float, minimum: int, h_rate: float = 0.5) -> int:
    """Number of RK4 steps keeping ``h * rate_bound <= h_rate``."""
    if t_final <= 0:
        return max(1, minimum)
    return max(minimum, int(np.ceil(t_final * rate_bound / h_rate)))

