"""Command-line front end.

Exit codes: 0 stabilizable / success, 1 not stabilizable (or a failing
reproduction row), 2 error. Errors are printed to stdout as
``{"error": code, "detail": message}``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import reproduce
from .constituent import bounds_table
from .density import TOL_DEGEN, Verdict, full_report
from .errors import SchemaError, StabilizerLabError
from .gaussian import full_report_cv
from .gaussian_core import CovarianceMatrix
from .serialize import (
    covariance_from_json,
    density_from_json,
    dumps,
    gaussian_spec_from_json,
    lindblads_from_json,
    matrix_to_json,
)

EXIT_OK, EXIT_NOT, EXIT_ERROR = 0, 1, 2


class CLIError(Exception):
    def __init__(self, code: str, detail: str):
        super().__init__(detail)
        self.code, self.detail = code, detail


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CLIError("usage", message)


def _load(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise CLIError("io_error", str(exc)) from exc
    except json.JSONDecodeError as exc:
        raise CLIError("malformed_json", str(exc)) from exc
    if not isinstance(doc, dict):
        raise SchemaError("input must be a JSON object")
    return doc


def _report(doc: dict, tol_zero: float | None, tol_degen: float):
    kind = doc.get("kind")
    if kind == "density":
        try:
            rho = density_from_json(doc["state"])
            lind = lindblads_from_json(doc["lindblads"])
            ignore = [int(i) for i in doc.get("ignore_levels", [])]
        except (KeyError, TypeError, AttributeError) as exc:
            raise SchemaError(f"density input needs 'state' and 'lindblads': {exc}") from exc
        if any(not 0 <= i < rho.dim for i in ignore):
            raise SchemaError("ignore_levels out of range")
        return full_report(rho, lind, tol_degen=tol_degen, tol_zero=tol_zero, ignore_levels=ignore)
    if kind == "gaussian":
        try:
            v = covariance_from_json(doc["covariance"])
            spec = gaussian_spec_from_json(doc["dissipator"])
        except (KeyError, TypeError, AttributeError) as exc:
            raise SchemaError(f"gaussian input needs 'covariance' and 'dissipator': {exc}") from exc
        if not CovarianceMatrix(v).is_valid:
            raise SchemaError("covariance matrix violates the uncertainty relation")
        return full_report_cv(v, spec, tol_zero=tol_zero)
    raise SchemaError(f"unknown input kind {kind!r}; expected 'density' or 'gaussian'")


def _table(report) -> str:
    doc = report.to_json()
    lines = [f"verdict            {doc['verdict']}", f"geometric verdict  {doc['geometric_verdict']}"]
    worst = max((abs(complex(r["re"], r["im"])) for r in doc["spectral"]), default=0.0)
    lines.append(f"max spectral |res| {worst:.3e}")
    lines.append(f"tol_zero           {doc['tolerances']['tol_zero']:.3e}")
    if doc["rhs_norm"] is not None:
        lines.append(f"stationarity       {doc['rhs_norm']:.3e}")
        lines.append(f"drift over t=5     {doc['verify_residual']:.3e}")
    return "\n".join(lines)


def cmd_check(args) -> int:
    report = _report(_load(args.input), args.tol_zero, args.tol_degen)
    print(_table(report) if args.table else dumps(report.to_json()))
    return EXIT_OK if report.verdict is Verdict.STABILIZABLE else EXIT_NOT


def cmd_synthesize(args) -> int:
    report = _report(_load(args.input), args.tol_zero, args.tol_degen)
    if report.verdict is not Verdict.STABILIZABLE:
        print(dumps({"verdict": report.verdict.value, "written": None}))
        return EXIT_NOT
    if hasattr(report, "synthesized_H"):
        out = {"kind": "hamiltonian", "H": matrix_to_json(report.synthesized_H)}
    else:
        out = {"kind": "quadratic_hamiltonian", "G": report.synthesized_G.tolist()}
    out["rhs_norm"] = report.rhs_norm
    out["verify_residual"] = report.verification_residual
    try:
        Path(args.out).write_text(dumps(out) + "\n", encoding="utf-8")
    except OSError as exc:
        raise CLIError("io_error", str(exc)) from exc
    print(dumps({"verdict": report.verdict.value, "written": str(args.out)}))
    return EXIT_OK


def cmd_bounds(args) -> int:
    rows = bounds_table(args.family, args.n_min, args.n_max)
    if args.table:
        key = f"{args.family}_bound"
        print(f"{'N':>3}  {'bound':>20}  {'zeta_max':>20}  certified")
        for r in rows:
            print(f"{r['N']:>3}  {r[key]:>20.17g}  {r['zeta_max']:>20.17g}  {r['certified']}")
    else:
        print(dumps(rows))
    return EXIT_OK if all(r["certified"] for r in rows) else EXIT_NOT


def cmd_reproduce(args) -> int:
    try:
        scenarios = reproduce.select(args.suite, args.filter)
    except KeyError as exc:
        raise CLIError("unknown_suite", str(exc)) from exc
    if not scenarios:
        raise CLIError("empty_selection", f"no scenario matches filter {args.filter!r}")
    rows = reproduce.run_scenarios(scenarios)
    markdown, table = reproduce.to_markdown(rows), reproduce.to_csv(rows)
    if args.out:
        out = Path(args.out)
        try:
            out.mkdir(parents=True, exist_ok=True)
            (out / "report.md").write_text(markdown, encoding="utf-8")
            (out / "report.csv").write_text(table, encoding="utf-8")
        except OSError as exc:
            raise CLIError("io_error", str(exc)) from exc
    print(markdown, end="")
    return EXIT_OK if all(r.passed for r in rows) else EXIT_NOT


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="stabilizer-lab", description="Stabilizability checks for density operators and Gaussian states.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def tolerances(sp):
        sp.add_argument("--tol-zero", type=float, default=None, help="absolute zero tolerance for residuals")
        sp.add_argument("--tol-degen", type=float, default=TOL_DEGEN, help="eigenvalue grouping tolerance (density inputs)")

    c = sub.add_parser("check", help="report stabilizability of a state")
    c.add_argument("input")
    tolerances(c)
    fmt = c.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="JSON report (default)")
    fmt.add_argument("--table", action="store_true", help="human-readable summary")
    c.set_defaults(func=cmd_check)

    s = sub.add_parser("synthesize", help="write the stabilizing Hamiltonian")
    s.add_argument("input")
    s.add_argument("--out", required=True)
    tolerances(s)
    s.set_defaults(func=cmd_synthesize)

    b = sub.add_parser("bounds", help="constituent bounds with spectral certification")
    b.add_argument("--family", choices=("ghz", "w"), required=True)
    b.add_argument("--n-min", type=int, default=2)
    b.add_argument("--n-max", type=int, default=13)
    fmt = b.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true")
    fmt.add_argument("--table", action="store_true")
    b.set_defaults(func=cmd_bounds)

    r = sub.add_parser("reproduce", help="run the reproduction suite")
    r.add_argument("--suite", default="paper")
    r.add_argument("--out", default=None, help="directory for report.md and report.csv")
    r.add_argument("--filter", default=None, help="scenario name substring or kind")
    r.set_defaults(func=cmd_reproduce)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except CLIError as exc:
        print(dumps({"error": exc.code, "detail": exc.detail}))
    except StabilizerLabError as exc:
        print(dumps({"error": exc.code, "detail": str(exc)}))
    except (ValueError, KeyError) as exc:
        print(dumps({"error": "invalid_input", "detail": str(exc)}))
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
