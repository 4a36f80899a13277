"""JSON documents exchanged by the command-line tool.

Exact values travel as strings ("p/q" or integers).  Outputs pair each
exact value with a decimal rendering for human readers.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .scalar import as_scalar, as_vector


class DocumentError(ValueError):
    """Malformed input document (CLI exit code 1)."""


def _literal(value) -> Fraction:
    if isinstance(value, float):
        raise DocumentError(f"floating-point literal {value!r} is not exact; use a 'p/q' string")
    try:
        return as_scalar(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise DocumentError(str(exc)) from None


def parse_vector(values) -> tuple:
    if isinstance(values, str):
        values = [v for v in values.split(",")]
    if not isinstance(values, list) or not values:
        raise DocumentError("expected a non-empty list of rationals")
    return tuple(_literal(v) for v in values)


def parse_points(doc: dict, key: str = "points") -> tuple:
    if key not in doc:
        raise DocumentError(f"document has no {key!r} field")
    raw = doc[key]
    if not isinstance(raw, list) or not raw:
        raise DocumentError(f"{key!r} must be a non-empty list of points")
    points = tuple(parse_vector(p) for p in raw)
    dim = doc.get("dim", len(points[0]))
    if not isinstance(dim, int) or any(len(p) != dim for p in points):
        raise DocumentError(f"every point in {key!r} must have dimension {dim}")
    return points


def parse_matrix(doc: dict, key: str = "matrix") -> tuple:
    if key not in doc:
        raise DocumentError(f"document has no {key!r} field")
    rows = doc[key]
    if not isinstance(rows, list) or not rows:
        raise DocumentError(f"{key!r} must be a non-empty list of rows")
    matrix = tuple(parse_vector(r) for r in rows)
    if any(len(r) != len(matrix) for r in matrix):
        raise DocumentError("matrix must be square")
    return matrix


def load_document(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise DocumentError("top-level JSON value must be an object")
    return doc


def decimal(x, digits: int = 12) -> str:
    """Deterministic decimal rendering of an exact or mpmath value."""
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return str(x.numerator)
        try:
            return format(float(x), f".{digits}g")
        except OverflowError:
            return ("-" if x < 0 else "") + "inf"
    import mpmath

    return mpmath.nstr(x, digits)


def scalar_out(x: Fraction) -> dict:
    return {"exact": str(x), "decimal": decimal(x)}


def vector_out(v) -> dict:
    v = as_vector(v)
    return {"exact": [str(x) for x in v], "decimal": [decimal(x) for x in v]}


def result_document(command: str, inputs: dict, settings: dict, outputs: Any, diagnostics: dict | None = None) -> dict:
    return {
        "command": command,
        "inputs": inputs,
        "settings": settings,
        "outputs": outputs,
        "diagnostics": diagnostics or {},
    }


def dump_document(doc: dict) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
