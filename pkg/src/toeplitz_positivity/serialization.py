"""JSON encoding of instances and reports.

Complex numbers travel as ``[re, im]`` pairs. Reports are written as
canonical JSON (sorted keys, floats with 17 significant digits) so that a
re-parsed report re-serializes to the same bytes.
"""

from __future__ import annotations

import json
import math
from enum import Enum

import numpy as np

from .errors import DimensionMismatch, InvalidInput
from .forms import ComplexQuadraticSymbolExponent, FormComparison, HolomorphicQuadraticForm, QuadraticWeight
from .positivity import PositivityVerdict, RouteOutcome

SCHEMA_VERSION = "1"


# ---------------------------------------------------------------------------
# decoding


def _entry(value, where: str) -> complex:
    if isinstance(value, bool):
        raise InvalidInput(f"{where}: booleans are not numbers")
    if isinstance(value, (int, float)):
        z = complex(value)
    elif isinstance(value, list) and len(value) == 2 and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
    ):
        z = complex(value[0], value[1])
    else:
        raise InvalidInput(f"{where}: expected a number or an [re, im] pair, got {value!r}")
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise InvalidInput(f"{where}: non-finite entry")
    return z


def parse_complex(value, where: str = "value") -> complex:
    return _entry(value, where)


def parse_vector(value, where: str = "vector") -> np.ndarray:
    if not isinstance(value, list):
        raise InvalidInput(f"{where}: expected a list")
    return np.array([_entry(v, f"{where}[{i}]") for i, v in enumerate(value)], dtype=complex)


def parse_matrix(value, where: str = "matrix") -> np.ndarray:
    if not isinstance(value, list) or not value or not all(isinstance(row, list) for row in value):
        raise InvalidInput(f"{where}: expected a non-empty list of rows")
    rows = [parse_vector(row, f"{where}[{i}]") for i, row in enumerate(value)]
    if len({len(r) for r in rows}) != 1:
        raise InvalidInput(f"{where}: rows have different lengths")
    return np.vstack(rows)


def _require(payload: dict, key: str, where: str):
    if not isinstance(payload, dict) or key not in payload:
        raise InvalidInput(f"{where}: missing field {key!r}")
    return payload[key]


def parse_weight(value, where: str = "weight") -> QuadraticWeight:
    A = parse_matrix(_require(value, "A", where), f"{where}.A")
    L = parse_matrix(_require(value, "L", where), f"{where}.L")
    if A.shape != L.shape or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"{where}: A has shape {A.shape} but L has shape {L.shape}")
    return QuadraticWeight(A, L)


def parse_holomorphic(value, where: str = "form") -> HolomorphicQuadraticForm:
    if isinstance(value, dict):
        value = _require(value, "Q", where)
    return HolomorphicQuadraticForm(parse_matrix(value, f"{where}.Q"))


def parse_symbol_exponent(value, where: str = "q") -> ComplexQuadraticSymbolExponent:
    mats = [parse_matrix(_require(value, k, where), f"{where}.{k}") for k in ("Q1", "Q2", "Q3")]
    if len({m.shape for m in mats}) != 1:
        raise DimensionMismatch(f"{where}: Q1, Q2, Q3 shapes differ")
    return ComplexQuadraticSymbolExponent(*mats)


def load_instance(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InvalidInput(f"cannot read instance file: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"instance file is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise InvalidInput("instance file must hold a JSON object")
    return data


# ---------------------------------------------------------------------------
# encoding


def to_jsonable(obj):
    """Plain JSON-compatible structure; complex values become ``[re, im]``."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return [to_jsonable(v) for v in obj]
        return [to_jsonable(v) for v in obj.tolist()] if obj.ndim else to_jsonable(obj.item())
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, QuadraticWeight):
        return {"A": encode_matrix(obj.A), "L": encode_matrix(obj.L)}
    if isinstance(obj, HolomorphicQuadraticForm):
        return {"Q": encode_matrix(obj.Q)}
    if isinstance(obj, (PositivityVerdict, RouteOutcome, FormComparison)):
        return to_jsonable(encode_verdict(obj))
    raise TypeError(f"cannot encode {type(obj).__name__}")


def encode_matrix(M: np.ndarray) -> list:
    M = np.asarray(M, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.atleast_2d(M)]


def encode_vector(v: np.ndarray) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v, dtype=complex)]


def encode_verdict(v) -> dict:
    if isinstance(v, FormComparison):
        return {
            "psd": v.psd,
            "pd": v.pd,
            "min_eigenvalue": v.min_eigenvalue,
            "margin": v.min_eigenvalue,
            "signature": list(v.signature),
            "witness": [float(x) for x in v.witness],
            "tol": v.tol,
        }
    if isinstance(v, RouteOutcome):
        out = {"route": v.name, "status": v.status.value if v.status else None, "error": v.error}
        if v.ok:
            out["min_eigenvalue"] = v.min_eigenvalue
            out["margin"] = v.min_eigenvalue
            out["tol"] = v.tol
        return out
    return {
        "status": v.status.value,
        "min_eigenvalue": v.min_eigenvalue,
        "margin": v.min_eigenvalue,
        "witness": encode_vector(v.witness),
        "route_agreement": v.route_agreement,
        "routes": {"direct": encode_verdict(v.direct), "characterization": encode_verdict(v.characterization)},
        "tol": v.tol,
    }


def _format_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return "null"
    if x == 0.0:
        x = 0.0  # drop the sign of zero
    return "%.17g" % x


def canonical_json(obj) -> str:
    """Deterministic JSON text: sorted keys, 17 significant digits, no whitespace variance."""
    parts: list[str] = []

    def emit(o, indent: int):
        pad = "  " * (indent + 1)
        if o is None:
            parts.append("null")
        elif isinstance(o, bool):
            parts.append("true" if o else "false")
        elif isinstance(o, int):
            parts.append(str(o))
        elif isinstance(o, float):
            parts.append(_format_float(o))
        elif isinstance(o, str):
            parts.append(json.dumps(o, ensure_ascii=True))
        elif isinstance(o, list):
            if not o:
                parts.append("[]")
            elif all(not isinstance(v, (list, dict)) for v in o):
                parts.append("[")
                for i, v in enumerate(o):
                    if i:
                        parts.append(", ")
                    emit(v, indent)
                parts.append("]")
            else:
                parts.append("[\n")
                for i, v in enumerate(o):
                    parts.append(pad)
                    emit(v, indent + 1)
                    parts.append(",\n" if i < len(o) - 1 else "\n")
                parts.append("  " * indent + "]")
        elif isinstance(o, dict):
            if not o:
                parts.append("{}")
                return
            parts.append("{\n")
            keys = sorted(o)
            for i, k in enumerate(keys):
                parts.append(pad + json.dumps(str(k), ensure_ascii=True) + ": ")
                emit(o[k], indent + 1)
                parts.append(",\n" if i < len(keys) - 1 else "\n")
            parts.append("  " * indent + "}")
        else:
            raise TypeError(f"not a JSON value: {type(o).__name__}")

    emit(to_jsonable(obj), 0)
    return "".join(parts) + "\n"
