"""JSON interchange with fixed 17-significant-digit floats.

Every float is written with ``%.17g`` so identical inputs give
byte-identical files.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .curves import curve_from_json
from .gauss import QuadratureRule
from .moments import MeasureSpec, MomentVector


class InputError(Exception):
    """Unreadable or malformed input file; carries the file path."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = str(path)
        self.message = message


def _float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    s = "%.17g" % x
    if "e" not in s and "." not in s and "n" not in s:
        s += ".0"
    return s


def _encode(obj, indent, level):
    pad = "" if indent is None else "\n" + " " * (indent * (level + 1))
    end = "" if indent is None else "\n" + " " * (indent * level)
    sep = "," if indent is None else ","
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist(), indent, level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [json.dumps(str(k)) + ": " + _encode(v, indent, level + 1) for k, v in obj.items()]
        return "{" + pad + (sep + pad).join(items) + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        # numeric rows stay on one line
        flat = all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj)
        if flat:
            return "[" + ", ".join(_encode(v, None, 0) for v in obj) + "]"
        items = [_encode(v, indent, level + 1) for v in obj]
        return "[" + pad + (sep + pad).join(items) + end + "]"
    if hasattr(obj, "to_json"):
        return _encode(obj.to_json(), indent, level)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    return _encode(obj, indent, 0) + "\n"


def dump(obj, path) -> None:
    Path(path).write_text(dumps(obj))


def load_json(path):
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise InputError(path, exc.strerror or str(exc)) from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(path, f"line {exc.lineno}: {exc.msg}") from exc


def _parse(path, fn):
    data = load_json(path)
    try:
        return fn(data)
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise InputError(path, f"{type(exc).__name__}: {exc}") from exc


def load_curve(path):
    return _parse(path, curve_from_json)


def load_measure(path) -> MeasureSpec:
    return _parse(path, MeasureSpec.from_json)


def load_rule(path) -> QuadratureRule:
    return _parse(path, lambda d: QuadratureRule.from_json(d.get("rule", d)))


def load_moments(path) -> MomentVector:
    return _parse(path, MomentVector.from_json)


def rule_csv(rule: QuadratureRule) -> str:
    """Node/weight table; parameter values are included when known."""
    dim = rule.ambient_dim
    head = [f"x{i + 1}" for i in range(dim)] + ["weight"]
    if rule.parameter_values is not None:
        head = ["t"] + head
    lines = [",".join(head)]
    for i in range(rule.size):
        row = [_float(v) for v in rule.nodes[i]] + [_float(rule.weights[i])]
        if rule.parameter_values is not None:
            row = [_float(rule.parameter_values[i])] + row
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"
