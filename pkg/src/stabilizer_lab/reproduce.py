"""Reproduction suite: every worked example and both bound families as checked rows.

Each scenario returns rows pairing a computed value with its reference value,
a provenance tag (``PAPER`` for values printed in the source, ``DERIVED`` for
values obtained here by an independent route) and a comparison rule.
"""

from __future__ import annotations

import csv
import io
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from . import constituent as cs
from .density import (
    Verdict,
    dissipative_fluxes,
    full_report,
    geometric_conditions,
    spectral_conditions,
)
from .gaussian import (
    closed_form_nu,
    entanglement_mixed,
    entanglement_mixed_terms,
    full_report_cv,
    log_negativity,
    mixed_model_nu,
    mixed_spec,
    spectral_conditions_cv,
    squeezed_thermal_residuals,
    three_channel_closed_form,
    three_channel_spec,
)
from .gaussian_core import GaussianDissipatorSpec, dissipator, linear_model, squeezed_thermal
from .operators import DensityOperator, LindbladSet, annihilation

THREADS_ENV = "STABILIZER_LAB_THREADS"


@dataclass(frozen=True)
class Row:
    scenario: str
    quantity: str
    computed: object
    expected: object
    provenance: str
    relation: str = "=="  # "==", "<=", ">" or "~" (|computed - expected| <= tol)
    tol: float = 0.0

    @property
    def passed(self) -> bool:
        c, e = self.computed, self.expected
        if self.relation == "~":
            return bool(abs(c - e) <= self.tol)
        if self.relation == "<=":
            return bool(c <= e + self.tol)
        if self.relation == ">":
            return bool(c > e)
        return c == e


@dataclass(frozen=True)
class ScenarioDescriptor:
    name: str
    kind: str  # "density", "constituent", "gaussian" or "bounds"
    parameters: dict = field(default_factory=dict)
    run: Callable[..., list] = field(default=None, repr=False, compare=False)

    def matches(self, pattern: str | None) -> bool:
        return pattern is None or pattern in self.name or pattern == self.kind

    def rows(self) -> list:
        return self.run(self.name, **self.parameters)


# ---------------------------------------------------------------------------
# density-operator examples


def qubit_decay() -> tuple[DensityOperator, LindbladSet]:
    return DensityOperator.from_matrix(np.eye(2) / 2), LindbladSet((np.array([[0, 1], [0, 0]]),))


def _example1(name):
    rho, lind = qubit_decay()
    geom = geometric_conditions(rho, lind)
    comp = spectral_conditions(rho, lind)
    report = full_report(rho, lind)
    s = 1 / np.sqrt(2)
    pm = rho.with_basis([0.5, 0.5], np.array([[s, s], [s, -s]]))
    rot = spectral_conditions(pm, lind)
    return [
        Row(name, "geometric residual k=1", float(geom[0]), 0.0, "PAPER", "~", 1e-12),
        Row(name, "<0|D|0>", comp.residuals[(0, 0)].real, 0.5, "DERIVED", "~", 1e-12),
        Row(name, "verdict", report.verdict.value, Verdict.NOT_STABILIZABLE.value, "PAPER"),
        Row(name, "geometric verdict", report.geometric_verdict.value, Verdict.INCONCLUSIVE_GEOMETRIC.value, "PAPER"),
        Row(name, "<+|D|+>", abs(rot.residuals[(0, 0)]), 0.0, "PAPER", "~", 1e-12),
        Row(name, "<+|D|->", abs(rot.residuals[(0, 1)]), 0.5, "PAPER", "~", 1e-12),
    ]


def thermal_residual_pattern(lam: np.ndarray) -> np.ndarray:
    """``(j+1) lambda_{j+1} - j lambda_j`` for ``j = 0 .. d-2``."""
    j = np.arange(len(lam) - 1)
    return (j + 1) * lam[1:] - j * lam[:-1]


def _example2(name, dims=(4, 8, 16), beta=0.7):
    rows = []
    for d in dims:
        lind = LindbladSet((annihilation(d),))
        flux = dissipative_fluxes(np.eye(d), lind)[: d - 1]
        _, s, vh = np.linalg.svd(flux)
        null_dim = d - int(np.sum(s > 1e-12))
        kernel = np.abs(vh[-1])
        rows.append(Row(name, f"d={d} flux kernel dimension", null_dim, 1, "PAPER"))
        rows.append(Row(name, f"d={d} kernel overlap with vacuum", float(kernel[0]), 1.0, "PAPER", "~", 1e-12))
        vac = np.zeros((d, d))
        vac[0, 0] = 1
        rep = full_report(DensityOperator.from_matrix(vac), lind, ignore_levels=[d - 1])
        rows.append(Row(name, f"d={d} vacuum verdict", rep.verdict.value, Verdict.STABILIZABLE.value, "PAPER"))
        lam = np.exp(-beta * np.arange(d))
        lam /= lam.sum()
        thermal = DensityOperator.from_matrix(np.diag(lam))
        cond = spectral_conditions(thermal, lind, ignore_levels=[d - 1])
        got = np.array([cond.residuals[(i, i)].real for i in range(d)])
        order = np.argsort(-lam)  # eigen-index i holds level order[i]
        by_level = np.empty(d)
        by_level[order] = got
        err = float(np.abs(by_level[: d - 1] - thermal_residual_pattern(lam)).max())
        rows.append(Row(name, f"d={d} thermal residual pattern error", err, 0.0, "PAPER", "<=", 1e-12))
        rows.append(Row(name, f"d={d} thermal stabilizable", cond.stabilizable, False, "PAPER"))
    return rows


# ---------------------------------------------------------------------------
# constituent bounds


def _example3_ghz(name, n_values=tuple(range(2, 9)), samples=50, seed=7):
    rng = np.random.default_rng(seed)
    rows = []
    for n in n_values:
        lind = cs.local_damping_lindblads(n)
        psi = cs.ghz_state(n)
        bound = cs.ghz_bound(n)
        rows.append(Row(name, f"N={n} normalized self residual", cs.ghz_diagonal_residual(n), -1.0, "PAPER", "~", 1e-12))
        probe = cs.ProbabilityProbe(psi, lind)
        worst = max(probe(cs.orthogonal_noise(psi, rng)) for _ in range(samples))
        rows.append(Row(name, f"N={n} max p over random noise", worst, bound, "PAPER", "<=", 1e-12))
        e1 = np.zeros(2**n)
        e1[cs.excitation_index(n, [1])] = 1
        p = cs.constituent_probability(psi, DensityOperator.pure(e1), lind)
        rows.append(Row(name, f"N={n} witness p", p, bound, "PAPER", "~", 1e-12))
    return rows


def _example4_w(name, n_max=13, full_space_max=10):
    rows = []
    for n in range(2, n_max + 1):
        err = float(np.abs(cs.zeta_spectrum(n) - cs.expected_zeta_spectrum(n)).max())
        rows.append(Row(name, f"N={n} Gram spectrum error", err, 0.0, "PAPER", "<=", 1e-12))
        if n <= full_space_max:
            full = np.sort(np.linalg.eigvalsh(cs.zeta_operator(n)))[::-1][:n]
            rows.append(
                Row(name, f"N={n} full-space spectrum error", float(np.abs(full - cs.zeta_spectrum(n)).max()), 0.0, "DERIVED", "<=", 1e-12)
            )
            psi = cs.w_state(n)
            noise = DensityOperator.pure(cs.dicke_two_excitation_state(n))
            p = cs.constituent_probability(psi, noise, cs.local_damping_lindblads(n))
            rows.append(Row(name, f"N={n} symmetric two-excitation p", p, cs.w_bound(n), "PAPER", "~", 1e-12))
    # N = 2: the only optimal noise is |11><11|
    e11 = np.zeros(4)
    e11[3] = 1
    lind2 = cs.local_damping_lindblads(2)
    p2 = cs.constituent_probability(cs.w_state(2), DensityOperator.pure(e11), lind2)
    rows.append(Row(name, "N=2 p with sigma=|11><11|", p2, 0.5, "PAPER", "~", 1e-12))
    mix = cs.ConstituentMixture(cs.w_state(2), p2, DensityOperator.pure(e11)).state
    verdict = spectral_conditions(mix, lind2).stabilizable
    rows.append(Row(name, "N=2 mixture passes spectral test", verdict, False, "DERIVED"))
    return rows


def _fidelity(name):
    phi_plus = np.array([1.0, 0, 0, 1])  # unnormalized, keeps the 1/2 exact
    e00 = np.zeros(4)
    e00[0] = 1
    rho = cs.rho_fid()
    return [
        Row(name, "F(rho_fid, Phi+)", cs.fidelity(rho, phi_plus), (3 + np.sqrt(5)) / 8, "PAPER", "~", 1e-12),
        Row(name, "F(|00><00|, Phi+)", cs.fidelity(DensityOperator.pure(e00), phi_plus), 0.5, "PAPER"),
        Row(name, "Phi+ eigenvector defect", cs.eigenvector_defect(rho, phi_plus), 0.01, "PAPER", ">"),
    ]


# ---------------------------------------------------------------------------
# Gaussian examples


def _example5(name, r_values=(0.2, 0.5, 1.0, 1.5), bump=0.05):
    rows = []
    for model in ("i", "ii", "iii"):
        for r in r_values:
            for alpha in ((0.0, 0.3, r) if model == "iii" else (None,)):
                spec = GaussianDissipatorSpec(1.0, linear_model(model, alpha))
                nu, _ = closed_form_nu(model, r, alpha)
                tag = f"model {model} r={r}" + ("" if alpha is None else f" alpha={alpha}")
                on = spectral_conditions_cv(squeezed_thermal(nu, nu, r).V, spec).max_residual
                off = spectral_conditions_cv(squeezed_thermal(nu + bump, nu + bump, r).V, spec).max_residual
                rows.append(Row(name, f"{tag} residual on solution", on, 0.0, "PAPER", "<=", 1e-10))
                rows.append(Row(name, f"{tag} residual at nu+{bump}", off, 1e-4, "DERIVED", ">"))
    spec = GaussianDissipatorSpec(1.0, linear_model("i"))
    nu, _ = closed_form_nu("i", 0.5)
    rep = full_report_cv(squeezed_thermal(nu, nu, 0.5).V, spec)
    rows.append(Row(name, "model i r=0.5 stationarity with G", rep.rhs_norm, 0.0, "DERIVED", "<=", 1e-8))
    rows.append(Row(name, "model i r=0.5 drift over t=5", rep.verification_residual, 0.0, "DERIVED", "<=", 1e-6))
    return rows


def _example6(name, kappas=(1 / 3, 1 / 3, 1 / 3), mu=0.4, theta=0.6, delta=0.4, points=20):
    spec = three_channel_spec(kappas, mu, theta, delta)
    nus = np.linspace(0.5, 3.0, points)
    rs = np.linspace(0.1, 2.0, points)
    passing, mismatch = 0, 0.0
    for nu1 in nus:
        for nu2 in nus:
            for r in rs:
                passing += spectral_conditions_cv(squeezed_thermal(nu1, nu2, r).V, spec).stabilizable
                got = squeezed_thermal_residuals(nu1, nu2, r, spec)
                ref = three_channel_closed_form(nu1, nu2, r, kappas, mu, theta, delta)
                mismatch = max(mismatch, *(abs(g - f) for g, f in zip(got, ref)))
    return [
        Row(name, f"stabilizable grid points ({points}^3)", passing, 0, "PAPER"),
        Row(name, "closed-form residual mismatch", mismatch, 0.0, "PAPER", "<=", 1e-10),
    ]


def _example7(name, samples=((1.0, 0.1, 1.0, 0.3, 0.5), (2.0, 0.5, 0.4, 0.1, 0.3), (1.0, 0.0, 0.8, 0.2, 0.7), (1.5, 1.0, 0.6, 0.6, 0.2))):
    rows = []
    for gl, gu, r, alpha, delta in samples:
        tag = f"gL={gl} gU={gu} r={r} a={alpha} d={delta}"
        spec = mixed_spec(gl, gu, alpha, delta)
        nu = mixed_model_nu(gl, gu, r, alpha, delta)
        root = brentq(lambda x: squeezed_thermal_residuals(x, x, r, spec)[0], 0.5, 2 * nu + 10, xtol=1e-14, rtol=1e-15)
        rows.append(Row(name, f"{tag} nu vs root", nu, root, "PAPER", "~", 1e-10))
        v = squeezed_thermal(nu, nu, r)
        rows.append(Row(name, f"{tag} E_N formula vs measure", entanglement_mixed(gl, gu, r, alpha, delta), log_negativity(v), "PAPER", "~", 1e-9))
        rows.append(Row(name, f"{tag} amplification term", entanglement_mixed_terms(gl, gu, r, alpha, delta)[1], 0.0, "PAPER", "<=", 0.0))
        rep = full_report_cv(v.V, spec)
        rows.append(Row(name, f"{tag} stationarity with G", rep.rhs_norm, 0.0, "DERIVED", "<=", 1e-8 * np.linalg.norm(dissipator(spec, v.V))))
    gu, delta = 0.4, 0.5
    gl = gu * (np.cosh(2 * delta) - 1)
    rows.append(Row(name, "feasibility boundary detected", mixed_model_nu(gl, gu, 1.0, 0.3, delta) is None, True, "PAPER"))
    rows.append(Row(name, "just inside boundary feasible", mixed_model_nu(gl * 1.001, gu, 1.0, 0.3, delta) is not None, True, "DERIVED"))
    return rows


def _bounds(name, family, n_min=2, n_max=13):
    rows = []
    formula = cs.ghz_bound if family == "ghz" else cs.w_bound
    for row in cs.bounds_table(family, n_min, n_max):
        n = row["N"]
        rows.append(Row(name, f"N={n} certified", row["certified"], True, "PAPER"))
        rows.append(Row(name, f"N={n} bound", row[f"{family}_bound"], formula(n), "PAPER", "~", 1e-15))
    return rows


PAPER_SUITE = (
    ScenarioDescriptor("example1_qubit_decay", "density", run=_example1),
    ScenarioDescriptor("example2_damped_oscillator", "density", run=_example2),
    ScenarioDescriptor("example3_ghz_bound", "constituent", run=_example3_ghz),
    ScenarioDescriptor("example4_w_bound", "constituent", run=_example4_w),
    ScenarioDescriptor("fidelity_figures", "constituent", run=_fidelity),
    ScenarioDescriptor("example5_linear_models", "gaussian", run=_example5),
    ScenarioDescriptor("example6_unitary_no_go", "gaussian", run=_example6),
    ScenarioDescriptor("example7_mixed_model", "gaussian", run=_example7),
    ScenarioDescriptor("bounds_ghz", "bounds", {"family": "ghz"}, run=_bounds),
    ScenarioDescriptor("bounds_w", "bounds", {"family": "w"}, run=_bounds),
)

SUITES = {"paper": PAPER_SUITE}


def thread_cap() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return min(4, os.cpu_count() or 1)
    try:
        return max(1, int(raw))
    except ValueError as exc:
        raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from exc


def select(suite: str = "paper", pattern: str | None = None) -> list:
    if suite not in SUITES:
        raise KeyError(f"unknown suite {suite!r}")
    return [s for s in SUITES[suite] if s.matches(pattern)]


def run_scenarios(scenarios, threads: int | None = None) -> list:
    """Run scenarios concurrently; rows come back in scenario order."""
    with ThreadPoolExecutor(max_workers=threads or thread_cap()) as pool:
        chunks = list(pool.map(ScenarioDescriptor.rows, scenarios))
    return [row for chunk in chunks for row in chunk]


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["scenario", "quantity", "computed", "expected", "relation", "tol", "provenance", "pass"])
    for r in rows:
        w.writerow([r.scenario, r.quantity, _fmt(r.computed), _fmt(r.expected), r.relation, _fmt(r.tol), r.provenance, r.passed])
    return buf.getvalue()


def to_markdown(rows) -> str:
    failed = sum(not r.passed for r in rows)
    lines = [
        "# Reproduction report",
        "",
        f"{len(rows) - failed} of {len(rows)} rows pass.",
        "",
        "| scenario | quantity | computed | expected | rule | source | pass |",
        "|---|---|---|---|---|---|---|",
    ]
    for r in rows:
        rule = r.relation if r.relation != "~" else f"within {r.tol:g}"
        lines.append(
            f"| {r.scenario} | {r.quantity} | {_fmt(r.computed)} | {_fmt(r.expected)} | {rule} | {r.provenance} | {'yes' if r.passed else 'NO'} |"
        )
    return "\n".join(lines) + "\n"
