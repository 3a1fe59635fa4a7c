"""JSON formats for correlations, input distributions and assemblages."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .boxes import Correlation, InputDistribution, validate_correlation
from .errors import ShapeMismatch
from .steering import Assemblage


def _dims(obj: dict, keys) -> tuple[int, ...]:
    try:
        dims = tuple(int(obj[k]) for k in keys)
    except (KeyError, TypeError, ValueError) as exc:
        raise ShapeMismatch(f"missing or invalid size fields {keys}") from exc
    if any(d < 1 for d in dims):
        raise ShapeMismatch("alphabet sizes must be positive")
    return dims


def correlation_from_json(obj: dict) -> Correlation:
    shape = _dims(obj, ("n_a", "n_b", "n_x", "n_y"))
    flat = np.asarray(obj.get("p", []), dtype=float)
    if flat.size != int(np.prod(shape)):
        raise ShapeMismatch(f"p has {flat.size} entries, expected {int(np.prod(shape))}")
    return validate_correlation(flat.reshape(shape), shape)


def correlation_to_json(c: Correlation) -> dict:
    return {"n_a": c.n_a, "n_b": c.n_b, "n_x": c.n_x, "n_y": c.n_y, "p": c.flat()}


def input_dist_from_json(obj: dict) -> InputDistribution:
    """{"n_x": int, "n_y": int, "weights": [flat (x, y) row-major]}."""
    n_x, n_y = _dims(obj, ("n_x", "n_y"))
    w = np.asarray(obj.get("weights", []), dtype=float)
    if w.size != n_x * n_y:
        raise ShapeMismatch(f"weights has {w.size} entries, expected {n_x * n_y}")
    return InputDistribution(w.reshape(n_x, n_y))


def assemblage_from_json(obj: dict) -> Assemblage:
    """ops[k] for k = a * n_x + x, each a flat list of interleaved (re, im) pairs, row-major."""
    n_a, n_x, d = _dims(obj, ("n_a", "n_x", "d_b"))
    ops = obj.get("ops", [])
    if len(ops) != n_a * n_x:
        raise ShapeMismatch(f"ops has {len(ops)} operators, expected {n_a * n_x}")
    out = np.empty((n_a, n_x, d, d), dtype=complex)
    for k, op in enumerate(ops):
        v = np.asarray(op, dtype=float)
        if v.size != 2 * d * d:
            raise ShapeMismatch(f"operator {k} has {v.size} reals, expected {2 * d * d}")
        out[k // n_x, k % n_x] = (v[0::2] + 1j * v[1::2]).reshape(d, d)
    return Assemblage(out)


def assemblage_to_json(a: Assemblage) -> dict:
    ops = []
    for k in range(a.n_a * a.n_x):
        op = a.ops[k // a.n_x, k % a.n_x].ravel()
        ops.append(np.column_stack([op.real, op.imag]).ravel().tolist())
    return {"n_a": a.n_a, "n_x": a.n_x, "d_b": a.d_b, "ops": ops}


def load_json(path: str | Path) -> dict:
    with open(path) as fh:
        return json.load(fh)
