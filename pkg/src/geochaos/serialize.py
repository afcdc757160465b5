"""Deterministic CSV/JSON writers shared by the experiment models and CLI.

CSV floats carry 17 significant digits (lossless for 64-bit floats), headers
are always present, and line endings are UNIX, so identical inputs produce
byte-identical files.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np


def format_float(x):
    return f"{float(x):.17g}"


def write_csv(path, header, columns):
    """Write columns (a list of equal-length 1-D arrays) under ``header``."""
    columns = [np.asarray(c) for c in columns]
    n = columns[0].shape[0]
    lines = [",".join(header)]
    for i in range(n):
        lines.append(",".join(format_float(c[i]) for c in columns))
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")
    return Path(path)


def to_jsonable(obj):
    if isinstance(obj, dict):
        return {k: to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def write_json(path, payload):
    text = json.dumps(to_jsonable(payload), indent=2, sort_keys=True)
    Path(path).write_text(text + "\n", encoding="ascii")
    return Path(path)


def dumps_json(payload):
    return json.dumps(to_jsonable(payload), indent=2, sort_keys=True)
