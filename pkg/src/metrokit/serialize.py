"""JSON layouts for matrices and state vectors, plus a fixed-precision encoder."""
from __future__ import annotations

import json
import math

import numpy as np


def matrix_to_json(m) -> dict:
    m = np.asarray(m, dtype=complex)
    return {
        "dim": int(m.shape[0]),
        "entries": [[[float(z.real), float(z.imag)] for z in row] for row in m],
    }


def matrix_from_json(payload: dict) -> np.ndarray:
    dim = int(payload["dim"])
    arr = np.asarray(payload["entries"], dtype=float)
    # accepts nested rows or a flat row-major list of [re, im] pairs
    arr = arr.reshape(dim, -1, 2)
    return arr[..., 0] + 1j * arr[..., 1]


def vector_to_json(v) -> dict:
    v = np.asarray(v, dtype=complex).ravel()
    return {"dim": int(v.size), "amplitudes": [[float(z.real), float(z.imag)] for z in v]}


def vector_from_json(payload: dict) -> np.ndarray:
    arr = np.asarray(payload["amplitudes"], dtype=float).reshape(-1, 2)
    if arr.shape[0] != int(payload["dim"]):
        raise ValueError("amplitude count does not match dim")
    return arr[:, 0] + 1j * arr[:, 1]


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    return obj


def _fmt(x: float, digits: int) -> str:
    if math.isnan(x) or math.isinf(x):
        return "null"
    if x == int(x) and abs(x) < 1e15:
        return repr(float(x))
    return format(x, f".{digits}g")


def dumps(obj, digits: int = 17, indent: int | None = 2) -> str:
    """json.dumps with floats written at ``digits`` significant digits."""

    def enc(o, level):
        pad = "" if indent is None else "\n" + " " * (indent * (level + 1))
        end = "" if indent is None else "\n" + " " * (indent * level)
        if isinstance(o, bool) or o is None:
            return json.dumps(o)
        if isinstance(o, float):
            return _fmt(o, digits)
        if isinstance(o, int):
            return str(o)
        if isinstance(o, str):
            return json.dumps(o)
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = [f"{pad}{json.dumps(k)}: {enc(v, level + 1)}" for k, v in o.items()]
            return "{" + ",".join(items) + end + "}"
        if isinstance(o, list):
            if not o:
                return "[]"
            # keep numeric leaves on one line
            if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in o):
                return "[" + ", ".join(enc(v, level) for v in o) + "]"
            items = [f"{pad}{enc(v, level + 1)}" for v in o]
            return "[" + ",".join(items) + end + "]"
        raise TypeError(f"cannot serialize {type(o).__name__}")

    return enc(_plain(obj), 0)
