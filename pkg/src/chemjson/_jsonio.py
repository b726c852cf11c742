"""Canonical JSON text: two-space indent, flat scalar arrays kept on one line."""

from __future__ import annotations

import json
import math

from .errors import InvariantViolation, MalformedJson

_scalar_dumps = json.JSONEncoder(ensure_ascii=False, allow_nan=False, separators=(", ", ": ")).encode


def loads(text: str | bytes):
    if isinstance(text, (bytes, bytearray)):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedJson(f"input is not UTF-8: {exc}") from None
    try:
        return json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise MalformedJson(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _reject_constant(name):
    raise json.JSONDecodeError(f"non-finite number {name}", name, 0)


def _is_flat(seq) -> bool:
    return all(not isinstance(v, (dict, list, tuple)) for v in seq)


def _write(obj, indent: int, out: list[str]) -> None:
    pad = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        last = len(obj) - 1
        for i, (key, value) in enumerate(obj.items()):
            out.append(pad + _scalar_dumps(str(key)) + ": ")
            _write(value, indent + 1, out)
            out.append(",\n" if i < last else "\n")
        out.append("  " * indent + "}")
    elif isinstance(obj, (list, tuple)):
        if _is_flat(obj):
            out.append(_scalar_dumps(list(obj)))
            return
        out.append("[\n")
        last = len(obj) - 1
        for i, value in enumerate(obj):
            out.append(pad)
            _write(value, indent + 1, out)
            out.append(",\n" if i < last else "\n")
        out.append("  " * indent + "]")
    else:
        out.append(_scalar_dumps(obj))


def dumps(obj) -> str:
    """Deterministic text for ``obj``; floats use the shortest round-trip form."""
    out: list[str] = []
    try:
        _write(obj, 0, out)
    except ValueError as exc:
        raise InvariantViolation(f"cannot serialize: {exc}") from None
    out.append("\n")
    return "".join(out)


def is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def is_finite_number(value) -> bool:
    return is_number(value) and math.isfinite(value)
