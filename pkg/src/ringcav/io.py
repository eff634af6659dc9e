"""Deterministic CSV and JSON writers for run artifacts."""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

# Bumped whenever a CSV column order or config key changes meaning.
SCHEMA_VERSION = 1


def format_float(x) -> str:
    """Shortest round-trip text for a float; ``nan``/``inf`` spelled out."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else format_float(x)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def write_json(path, obj) -> None:
    text = json.dumps(to_jsonable(obj), indent=2, sort_keys=True, allow_nan=False)
    Path(path).write_text(text + "\n", encoding="utf-8")


def write_csv(path, columns: dict, header: dict | None = None) -> None:
    """Write equal-length columns; ``header`` goes first as ``# key: json`` lines."""
    names = list(columns)
    data = [np.asarray(columns[k]) for k in names]
    n = {len(d) for d in data}
    if len(n) > 1:
        raise ValueError("columns differ in length")
    lines = []
    for k, v in (header or {}).items():
        lines.append(f"# {k}: {json.dumps(to_jsonable(v), sort_keys=True)}")
    lines.append(",".join(names))
    for row in zip(*data):
        lines.append(",".join(format_float(v) if not isinstance(v, str) else v for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_csv(path):
    """Inverse of :func:`write_csv`: returns ``(header, columns)``."""
    header, cols, names = {}, None, None
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("# "):
            k, v = line[2:].split(": ", 1)
            header[k] = json.loads(v)
        elif names is None:
            names = line.split(",")
            cols = {k: [] for k in names}
        else:
            for k, v in zip(names, line.split(",")):
                cols[k].append(float(v))
    return header, {k: np.asarray(v) for k, v in (cols or {}).items()}
