"""JSON schemas for matrices, states and dissipators.

Floats are written with 17 significant digits so that output is byte-stable
for fixed inputs.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .errors import SchemaError
from .operators import DensityOperator, LindbladSet


def dumps(obj, indent: int | None = 2) -> str:
    """Serialize plain JSON data with fixed ``%.17g`` float formatting."""
    return _emit(obj, indent, 0)


def _emit(obj, indent, level) -> str:
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            raise SchemaError(f"cannot serialize non-finite float {x!r}")
        return format(x, ".17g")
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, np.ndarray):
        return _emit(obj.tolist(), indent, level)
    pad = "" if indent is None else "\n" + " " * (indent * (level + 1))
    end = "" if indent is None else "\n" + " " * (indent * level)
    sep = "," if indent is None else ","
    colon = ":" if indent is None else ": "
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [pad + json.dumps(str(k)) + colon + _emit(v, indent, level + 1) for k, v in obj.items()]
        return "{" + sep.join(items) + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(_emit(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _emit(v, indent, level + 1) for v in obj]
        return "[" + sep.join(items) + end + "]"
    raise SchemaError(f"cannot serialize {type(obj).__name__}")


def matrix_to_json(m) -> dict:
    m = np.asarray(m, dtype=complex)
    return {"d": int(m.shape[0]), "re": m.real.tolist(), "im": m.imag.tolist()}


def matrix_from_json(doc) -> np.ndarray:
    try:
        d = doc["d"]
        re = np.asarray(doc["re"], dtype=float)
        im = np.asarray(doc.get("im", np.zeros_like(re)), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed complex matrix: {exc}") from exc
    if not isinstance(d, int) or isinstance(d, bool) or d < 1:
        raise SchemaError(f"matrix dimension must be a positive integer, got {d!r}")
    if re.shape != (d, d) or im.shape != (d, d):
        raise SchemaError(f"matrix entries do not have shape ({d}, {d})")
    if not (np.all(np.isfinite(re)) and np.all(np.isfinite(im))):
        raise SchemaError("matrix has non-finite entries")
    return re + 1j * im


def density_to_json(rho: DensityOperator) -> dict:
    return {"kind": "density", **matrix_to_json(rho.matrix)}


def density_from_json(doc) -> DensityOperator:
    if doc.get("kind") != "density":
        raise SchemaError("expected an object with kind 'density'")
    return DensityOperator.from_matrix(matrix_from_json(doc))


def lindblads_to_json(lindblads: LindbladSet) -> dict:
    return {
        "kind": "lindblad_set",
        "gamma": float(lindblads.gamma),
        "operators": [matrix_to_json(op) for op in lindblads.operators],
    }


def lindblads_from_json(doc) -> LindbladSet:
    if doc.get("kind") != "lindblad_set":
        raise SchemaError("expected an object with kind 'lindblad_set'")
    gamma = doc.get("gamma", 1.0)
    if not isinstance(gamma, (int, float)) or gamma < 0:
        raise SchemaError(f"gamma must be a non-negative number, got {gamma!r}")
    ops = doc.get("operators")
    if not isinstance(ops, list) or not ops:
        raise SchemaError("'operators' must be a non-empty list")
    return LindbladSet(tuple(matrix_from_json(o) for o in ops), float(gamma))


def covariance_to_json(v) -> dict:
    v = np.asarray(v, dtype=float)
    return {"N": v.shape[0] // 2, "V": v.tolist()}


def covariance_from_json(doc) -> np.ndarray:
    try:
        n = doc["N"]
        v = np.asarray(doc["V"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed covariance matrix: {exc}") from exc
    if not isinstance(n, int) or n < 1 or v.shape != (2 * n, 2 * n):
        raise SchemaError(f"covariance matrix must be {2 * n}x{2 * n} for N={n!r}")
    if not np.all(np.isfinite(v)):
        raise SchemaError("covariance matrix has non-finite entries")
    return v


def gaussian_spec_to_json(spec) -> dict:
    return {
        "gamma_L": float(spec.gamma_L),
        "C": None if spec.linear is None else _rect_to_json(spec.linear.C),
        "gamma_U": float(spec.gamma_U),
        "channels": [] if spec.unitary is None else [
            {"kappa": float(k), "K": np.asarray(K.K).tolist()} for k, K in spec.unitary.channels
        ],
    }


def gaussian_spec_from_json(doc):
    from .gaussian_core import GaussianDissipatorSpec, LinearLindbladSpec, SymplecticMatrix, UnitaryChannelSpec

    try:
        gamma_l = float(doc.get("gamma_L", 0.0))
        gamma_u = float(doc.get("gamma_U", 0.0))
        c_doc = doc.get("C")
        channels = doc.get("channels") or []
        linear = None if c_doc is None else LinearLindbladSpec(_rect_from_json(c_doc))
        unitary = None
        if channels:
            unitary = UnitaryChannelSpec(
                tuple((float(ch["kappa"]), SymplecticMatrix(np.asarray(ch["K"], dtype=float))) for ch in channels)
            )
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise SchemaError(f"malformed dissipator spec: {exc}") from exc
    return GaussianDissipatorSpec(gamma_l, linear, gamma_u, unitary)


def _rect_to_json(m) -> dict:
    m = np.asarray(m, dtype=complex)
    return {"rows": int(m.shape[0]), "cols": int(m.shape[1]), "re": m.real.tolist(), "im": m.imag.tolist()}


def _rect_from_json(doc) -> np.ndarray:
    re = np.asarray(doc["re"], dtype=float)
    im = np.asarray(doc.get("im", np.zeros_like(re)), dtype=float)
    if re.ndim != 2 or re.shape != im.shape:
        raise SchemaError("C must be a 2-d complex matrix")
    if "rows" in doc and re.shape != (doc["rows"], doc["cols"]):
        raise SchemaError("C shape does not match rows/cols")
    return re + 1j * im
