"""Stabilizability of Gaussian covariance matrices.

A covariance matrix ``V`` is stabilizable by a quadratic Hamiltonian
``H = xi^T G xi / 2`` when ``J G V - V G J + D(V) = 0`` has a real symmetric
solution ``G``. The test runs in the eigenbasis of ``J V``: ``D(V)`` must have
no component between eigenvectors that share an eigenvalue.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .density import TOL_ZERO_FLOOR, TOL_ZERO_REL, Verdict
from .errors import (
    DegeneracyGroupingAmbiguous,
    Infeasible,
    NotStabilizable,
    NotStandardForm,
    NotTwoMode,
    SingularCovariance,
)
from .gaussian_core import (
    GaussianDissipatorSpec,
    SymplecticEigendata,
    UnitaryChannelSpec,
    channel_K1,
    channel_K2,
    channel_K3,
    dissipator,
    linear_model,
    model_engineered_squeezing,
    squeezed_thermal,
    symplectic_eigendata,
    symplectic_eigenvalues,
    symplectic_form,
    tilde_dissipator,
)
from .linalg import rk4_step, stable_step_count

Z_GROUP_REL = 1e-9
G_REALITY_TOL = 1e-9
STANDARD_FORM_TOL = 1e-10


def _as_v(v) -> np.ndarray:
    return np.asarray(getattr(v, "V", v), dtype=float)


def geometric_tolerances(v, spec: GaussianDissipatorSpec) -> np.ndarray:
    """Per-k zero tolerances scaled like ``||D~|| * ||V~||^(k-1)``."""
    v = _as_v(v)
    j = symplectic_form(v.shape[0] // 2)
    vt = j @ v
    dn = np.linalg.norm(tilde_dissipator(spec, vt))
    vn = np.linalg.norm(vt, 2)
    return np.array([max(TOL_ZERO_FLOOR, TOL_ZERO_REL * dn * vn ** (k - 1)) for k in range(1, v.shape[0] + 1)])


def geometric_conditions_cv(v, spec: GaussianDissipatorSpec) -> np.ndarray:
    """``Tr[D~(V~) V~^(k-1)]`` for ``k = 1..2N`` with ``V~ = J V``."""
    v = _as_v(v)
    if abs(np.linalg.det(v)) <= 1e-12:
        raise SingularCovariance("covariance matrix is not invertible")
    n2 = v.shape[0]
    vt = symplectic_form(n2 // 2) @ v
    dt = tilde_dissipator(spec, vt)
    out = np.empty(n2)
    power = np.eye(n2)
    for k in range(n2):
        out[k] = np.trace(dt @ power)
        power = power @ vt
    return out


def group_z(z: np.ndarray, tol: float) -> tuple:
    """Group eigenvalues of ``J V`` that agree within ``tol``.

    Raises:
        DegeneracyGroupingAmbiguous: if two eigenvalues sit in ``(tol, 10 tol)``.
    """
    gaps = np.abs(z[:, None] - z[None, :])
    if np.any((gaps > tol) & (gaps < 10 * tol)):
        raise DegeneracyGroupingAmbiguous(f"eigenvalues of J V are neither equal nor separated at tol {tol:.1e}")
    groups, seen = [], set()
    for l in range(len(z)):
        if l in seen:
            continue
        members = tuple(int(m) for m in np.where(gaps[l] <= tol)[0])
        seen.update(members)
        groups.append(members)
    return tuple(groups)


@dataclass(frozen=True)
class CVSpectralConditions:
    """Residuals ``zeta_l^+ D(V) zeta_l'`` over pairs with ``z_l = z_l'`` (``l <= l'``).

    Unit-norm eigenvectors are used. ``redundant`` lists the pairs from the
    ``-i nu`` groups, whose residuals mirror (by complex conjugation) those of
    the ``+i nu`` groups.
    """

    residuals: dict
    redundant: frozenset
    groups: tuple
    max_residual: float
    tol_zero: float
    eigendata: SymplecticEigendata = field(repr=False)

    @property
    def stabilizable(self) -> bool:
        return self.max_residual <= self.tol_zero


def spectral_conditions_cv(v, spec: GaussianDissipatorSpec, tol_zero: float | None = None) -> CVSpectralConditions:
    v = _as_v(v)
    ed = symplectic_eigendata(v)
    d_v = dissipator(spec, v)
    if tol_zero is None:
        tol_zero = max(TOL_ZERO_FLOOR, TOL_ZERO_REL * float(np.linalg.norm(d_v)))
    groups = group_z(ed.z, Z_GROUP_REL * max(1.0, float(np.linalg.norm(v))))
    m = ed.zeta.conj().T @ d_v @ ed.zeta
    residuals, redundant = {}, set()
    for g in groups:
        for a in g:
            for b in g:
                if a <= b:
                    residuals[(a, b)] = complex(m[a, b])
                    if ed.z[a].imag < 0:
                        redundant.add((a, b))
    worst = max(abs(x) for x in residuals.values())
    return CVSpectralConditions(residuals, frozenset(redundant), groups, float(worst), float(tol_zero), ed)


def covariance_rhs(v, spec: GaussianDissipatorSpec, g=None) -> np.ndarray:
    """``dV/dt = J G V - V G J + D(V)``."""
    v = np.asarray(v, dtype=float)
    out = dissipator(spec, v)
    if g is not None:
        j = symplectic_form(v.shape[0] // 2)
        out = out + j @ g @ v - v @ g @ j
    return out


def synthesize_G(v, spec: GaussianDissipatorSpec, conditions: CVSpectralConditions | None = None) -> np.ndarray:
    """Quadratic Hamiltonian matrix ``G`` that makes ``V`` stationary.

    With ``S = sqrt(V)`` and orthonormal eigenpairs ``(z_l, w_l)`` of
    ``S J S``, the ansatz ``G = J S A S J^T`` turns stationarity into
    ``[A, S J S] = -S^-1 D(V) S^-1``, solved entrywise off the degenerate
    blocks.

    Raises:
        NotStabilizable: if the spectral conditions fail, ``G`` comes out
            complex, or the stationarity residual exceeds ``1e-8 ||D(V)||``.
    """
    v = _as_v(v)
    cond = conditions or spectral_conditions_cv(v, spec)
    if not cond.stabilizable:
        raise NotStabilizable(f"spectral residual {cond.max_residual:.3e} exceeds {cond.tol_zero:.3e}")
    ed = cond.eigendata
    s = ed.sqrt_v
    d_v = dissipator(spec, v)
    s_inv_d = np.linalg.solve(s, np.linalg.solve(s, d_v).T).T
    m = ed.w.conj().T @ s_inv_d @ ed.w
    dz = ed.z[:, None] - ed.z[None, :]
    same = np.zeros(dz.shape, dtype=bool)
    for grp in cond.groups:
        same[np.ix_(grp, grp)] = True
    a = np.where(same, 0.0, m / np.where(same, 1.0, dz))
    j = symplectic_form(v.shape[0] // 2)
    g = j @ s @ (ed.w @ a @ ed.w.conj().T) @ s @ j.T
    scale = max(float(np.linalg.norm(g)), 1e-300)
    if np.linalg.norm(g.imag) > G_REALITY_TOL * scale and np.linalg.norm(g.imag) > 1e-14:
        raise NotStabilizable(f"synthesized G has imaginary part {np.linalg.norm(g.imag):.3e}")
    g = g.real
    g = 0.5 * (g + g.T)
    resid = np.linalg.norm(covariance_rhs(v, spec, g))
    if resid > max(1e-8 * np.linalg.norm(d_v), 1e-14):
        raise NotStabilizable(f"stationarity residual {resid:.3e} with synthesized G")
    return g


def generator_norm_bound_cv(spec: GaussianDissipatorSpec, g=None) -> float:
    bound = 0.0
    if g is not None:
        bound += 2 * np.linalg.norm(g, 2)
    if spec.linear is not None:
        bound += spec.gamma_L * 2 * np.linalg.norm(spec.linear.im, 2)
    if spec.unitary is not None:
        bound += spec.gamma_U * sum(k * (np.linalg.norm(K.K, 2) ** 2 + 1) for k, K in spec.unitary.channels)
    return bound


def evolve_covariance(v0, spec: GaussianDissipatorSpec, t_final: float, g=None, min_steps: int = 1000) -> np.ndarray:
    """Classical RK4 for the covariance equation; step count adapts to stiffness."""
    v = np.array(_as_v(v0), dtype=float)
    steps = stable_step_count(t_final, generator_norm_bound_cv(spec, g), min_steps)
    h = t_final / steps
    for _ in range(steps):
        v = rk4_step(lambda x: covariance_rhs(x, spec, g), v, h)
        v = 0.5 * (v + v.T)
    return v


@dataclass(frozen=True)
class CVStabilizabilityReport:
    geometric_residuals: np.ndarray
    spectral_residuals: dict
    redundant_pairs: frozenset
    verdict: Verdict
    geometric_verdict: Verdict
    synthesized_G: np.ndarray | None
    rhs_norm: float | None
    verification_residual: float | None
    tolerances: dict

    def to_json(self) -> dict:
        spectral = [
            {"l": a, "m": b, "re": z.real, "im": z.imag, "redundant": (a, b) in self.redundant_pairs}
            for (a, b), z in sorted(self.spectral_residuals.items())
        ]
        return {
            "verdict": self.verdict.value,
            "geometric_verdict": self.geometric_verdict.value,
            "geometric": [float(x) for x in self.geometric_residuals],
            "spectral": spectral,
            "G": None if self.synthesized_G is None else self.synthesized_G.tolist(),
            "rhs_norm": self.rhs_norm,
            "verify_residual": self.verification_residual,
            "tolerances": dict(self.tolerances),
        }


def full_report_cv(
    v,
    spec: GaussianDissipatorSpec,
    tol_zero: float | None = None,
    t_verify: float = 5.0,
    min_steps: int = 1000,
) -> CVStabilizabilityReport:
    """Geometric and spectral verdicts, synthesis of ``G`` and an integration check."""
    v = _as_v(v)
    cond = spectral_conditions_cv(v, spec, tol_zero)
    geom = geometric_conditions_cv(v, spec)
    geom_tol = geometric_tolerances(v, spec)
    degenerate = any(len(grp) > 1 for grp in cond.groups)
    if np.any(np.abs(geom) > geom_tol):
        geom_verdict = Verdict.NOT_STABILIZABLE
    elif degenerate:
        geom_verdict = Verdict.INCONCLUSIVE_GEOMETRIC
    else:
        geom_verdict = Verdict.STABILIZABLE

    g = rhs_norm = drift = None
    verdict = Verdict.NOT_STABILIZABLE
    if cond.stabilizable:
        verdict = Verdict.STABILIZABLE
        g = synthesize_G(v, spec, cond)
        rhs_norm = float(np.linalg.norm(covariance_rhs(v, spec, g)))
        drift = float(np.linalg.norm(evolve_covariance(v, spec, t_verify, g, min_steps) - v))
    return CVStabilizabilityReport(
        geometric_residuals=geom,
        spectral_residuals=cond.residuals,
        redundant_pairs=cond.redundant,
        verdict=verdict,
        geometric_verdict=geom_verdict,
        synthesized_G=g,
        rhs_norm=rhs_norm,
        verification_residual=drift,
        tolerances={"tol_zero": cond.tol_zero, "tol_z": Z_GROUP_REL * max(1.0, float(np.linalg.norm(v)))},
    )


# ---------------------------------------------------------------------------
# Two-mode scenarios with closed-form answers


def closed_form_nu(model: str, r: float, alpha: float | None = None) -> tuple[float, float]:
    """Stabilizable symplectic spectrum of the squeezed thermal family under model i, ii or iii."""
    linear_model(model, alpha)  # rejects unknown models and a missing alpha
    if model == "iii":
        nu = np.cosh(2 * (r - alpha)) / 2
    else:
        nu = np.cosh(2 * r) / 2
    return float(nu), float(nu)


def mixed_spec(gamma_L: float, gamma_U: float, alpha: float, delta: float) -> GaussianDissipatorSpec:
    """Engineered squeezing (model iii) disturbed by amplification ``K_3(delta)``."""
    return GaussianDissipatorSpec(
        gamma_L, model_engineered_squeezing(alpha), gamma_U, UnitaryChannelSpec(((1.0, channel_K3(delta)),))
    )


def three_channel_spec(kappas, mu: float, theta: float, delta: float, gamma_U: float = 1.0) -> GaussianDissipatorSpec:
    """Unitary dissipation mixing phase conjugation, beamsplitter and amplifier channels."""
    chans = tuple(
        (k, K) for k, K in zip(kappas, (channel_K1(mu), channel_K2(theta), channel_K3(delta))) if k > 0
    )
    return GaussianDissipatorSpec(0.0, None, gamma_U, UnitaryChannelSpec(chans))


def mixed_model_nu(gamma_L: float, gamma_U: float, r: float, alpha: float, delta: float) -> float | None:
    """Stabilizable ``nu`` for the mixed model, or ``None`` when no valid state exists."""
    if gamma_L < 0 or gamma_U < 0:
        raise ValueError("rates must be non-negative")
    loss = gamma_U * (np.cosh(2 * delta) - 1)
    denom = gamma_L - loss
    if denom <= 1e-12 * max(gamma_L, loss, 1e-300):
        return None
    nu = gamma_L * np.cosh(2 * r - 2 * alpha) / (2 * denom)
    return float(nu) if nu >= 0.5 else None


def family_zeta(r: float) -> tuple[np.ndarray, np.ndarray]:
    """Unnormalized ``J V`` eigenvectors of the squeezed thermal family for ``+i nu_1`` and ``+i nu_2``."""
    cth, th = 1 / np.tanh(r), np.tanh(r)
    return (
        np.array([-1j * cth, cth, 1j, 1.0]),
        np.array([1j * th, th, -1j, 1.0]),
    )


def squeezed_thermal_residuals(nu1: float, nu2: float, r: float, spec: GaussianDissipatorSpec) -> tuple[float, float]:
    """Spectral residuals of ``squeezed_thermal(nu1, nu2, r)`` with the unnormalized family eigenvectors.

    Both residuals are real; for ``nu1 != nu2`` they are the complete set of
    independent conditions.
    """
    d_v = dissipator(spec, squeezed_thermal(nu1, nu2, r).V)
    z1, z3 = family_zeta(r)
    return float((z1.conj() @ d_v @ z1).real), float((z3.conj() @ d_v @ z3).real)


def three_channel_closed_form(nu1, nu2, r, kappas, mu, theta, delta, gamma_U: float = 1.0) -> tuple[float, float]:
    k1, k2, k3 = kappas
    kb = k2 * np.sin(theta) ** 2
    q = k1 * (np.cosh(2 * mu) - 1) + kb * (np.cosh(4 * r) - 1) + k3 * (np.cosh(2 * delta) - 1)
    s = 2 * (k1 + kb)
    return (
        gamma_U * ((q - s) * nu1 + (q + s) * nu2) / np.sinh(r) ** 2,
        gamma_U * ((q + s) * nu1 + (q - s) * nu2) / np.cosh(r) ** 2,
    )


def mixed_closed_form(nu1, nu2, r, gamma_L, gamma_U, alpha, delta) -> tuple[float, float]:
    amp = gamma_U * (np.cosh(2 * delta) - 1) * (nu1 + nu2)
    c = np.cosh(2 * r - 2 * alpha)
    return (
        (gamma_L * (c - 2 * nu1) + amp) / np.sinh(r) ** 2,
        (gamma_L * (c - 2 * nu2) + amp) / np.cosh(r) ** 2,
    )


# ---------------------------------------------------------------------------
# Entanglement


def standard_form_entries(v) -> tuple[float, float, float, float]:
    """``(a, b, c_plus, c_minus)`` of a two-mode covariance matrix in standard form."""
    v = _as_v(v)
    if v.shape != (4, 4):
        raise NotTwoMode(f"expected a 4x4 covariance matrix, got {v.shape}")
    a, b, cp, cm = v[0, 0], v[2, 2], v[0, 2], v[1, 3]
    model = np.array([[a, 0, cp, 0], [0, a, 0, cm], [cp, 0, b, 0], [0, cm, 0, b]])
    if np.abs(v - model).max() > STANDARD_FORM_TOL:
        raise NotStandardForm("covariance matrix has entries outside the standard-form pattern")
    return float(a), float(b), float(cp), float(cm)


def log_negativity(v) -> float:
    a, b, cp, cm = standard_form_entries(v)
    delta_t = a * a + b * b - 2 * cp * cm
    det = (a * b - cp * cp) * (a * b - cm * cm)
    nu_minus = np.sqrt(0.5 * (delta_t - np.sqrt(max(delta_t * delta_t - 4 * det, 0.0))))
    return float(max(0.0, -np.log(2 * nu_minus)))


def entanglement_mixed_terms(gamma_L, gamma_U, r, alpha, delta) -> tuple[float, float]:
    """The engineered-squeezing term and the (non-positive) amplification term."""
    denom = gamma_L - gamma_U * (np.cosh(2 * delta) - 1)
    if mixed_model_nu(gamma_L, gamma_U, r, alpha, delta) is None:
        raise Infeasible("no valid stabilizable state for these rates")
    first = -np.log(np.exp(-2 * r) * np.cosh(2 * (r - alpha)))
    second = -np.log(gamma_L / denom)
    return float(first), float(second)


def entanglement_mixed(gamma_L, gamma_U, r, alpha, delta) -> float:
    """Log negativity of the mixed-model stabilizable state (clamped at zero like the measure)."""
    return max(0.0, sum(entanglement_mixed_terms(gamma_L, gamma_U, r, alpha, delta)))


# ---------------------------------------------------------------------------
# Scenario sweeps


@dataclass(frozen=True)
class ScenarioPoint:
    model: str  # "i", "ii", "iii" or "mixed"
    r: float
    alpha: float = 0.0
    delta: float = 0.0
    gamma_L: float = 1.0
    gamma_U: float = 0.0

    def spec(self) -> GaussianDissipatorSpec:
        if self.model == "mixed":
            return mixed_spec(self.gamma_L, self.gamma_U, self.alpha, self.delta)
        return GaussianDissipatorSpec(self.gamma_L, linear_model(self.model, self.alpha))

    def nu(self) -> float | None:
        if self.model == "mixed":
            return mixed_model_nu(self.gamma_L, self.gamma_U, self.r, self.alpha, self.delta)
        return closed_form_nu(self.model, self.r, self.alpha)[0]


SWEEP_COLUMNS = ("model", "r", "alpha", "delta", "gamma_L", "gamma_U", "nu1", "nu2", "verdict", "E_N")


def evaluate_point(p: ScenarioPoint) -> dict:
    nu = p.nu()
    row = {"model": p.model, "r": p.r, "alpha": p.alpha, "delta": p.delta, "gamma_L": p.gamma_L, "gamma_U": p.gamma_U}
    if nu is None:
        return {**row, "nu1": None, "nu2": None, "verdict": "Infeasible", "E_N": None}
    v = squeezed_thermal(nu, nu, p.r)
    cond = spectral_conditions_cv(v.V, p.spec())
    verdict = Verdict.STABILIZABLE if cond.stabilizable else Verdict.NOT_STABILIZABLE
    return {**row, "nu1": nu, "nu2": nu, "verdict": verdict.value, "E_N": log_negativity(v)}


def sweep_csv(points) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for p in points:
        row = evaluate_point(p)
        writer.writerow({k: ("" if v is None else format(v, ".17g") if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()


def symplectic_spectrum_drift(v, spec: GaussianDissipatorSpec, t: float = 1e-3) -> float:
    """Largest change of a symplectic eigenvalue under the bare dissipator over time ``t``."""
    v = _as_v(v)
    return float(np.abs(symplectic_eigenvalues(evolve_covariance(v, spec, t, None, 50)) - symplectic_eigenvalues(v)).max())

