"""Serialization of reports, curve tables and meshes."""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Iterable, Sequence

import numpy as np

SCHEMA = 1


def plain(obj):
    """Convert numpy data, complex numbers and non-finite floats to JSON values."""
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        z = complex(obj)
        if z.imag == 0:
            return plain(z.real)
        return {"re": plain(z.real), "im": plain(z.imag)}
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def to_json(obj) -> str:
    return json.dumps(plain(obj), indent=2) + "\n"


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def to_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def to_obj(vertices: np.ndarray, faces: np.ndarray | None = None, lines: Sequence[Sequence[int]] = (),
           comment: str | None = None) -> str:
    """OBJ text with ``v``, ``f`` and ``l`` records (indices given zero-based)."""
    out = []
    if comment:
        out.append(f"# {comment}")
    for v in np.asarray(vertices, dtype=float).reshape(-1, 3):
        out.append("v {} {} {}".format(*(repr(float(c)) for c in v)))
    if faces is not None:
        for f in np.asarray(faces, dtype=int):
            out.append("f " + " ".join(str(i + 1) for i in f))
    for ln in lines:
        out.append("l " + " ".join(str(i + 1) for i in ln))
    return "\n".join(out) + "\n"
