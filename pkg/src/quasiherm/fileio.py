"""JSON operator/state files and CSV formatting.

Operator file::

    {"dim": 2, "label": "optional", "matrix": [[[re, im], [re, im]], [[re, im], [re, im]]]}

State file::

    {"dim": 2, "label": "optional", "vector": [[re, im], [re, im]]}

Floats are written with ``repr``, which round-trips IEEE doubles exactly.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from .errors import DimensionMismatch, ParseError


def _load(path) -> tuple[dict, bytes]:
    raw = Path(path).read_bytes()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"{path}: invalid UTF-8 at byte offset {exc.start}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        offset = len(text[: exc.pos].encode("utf-8"))
        raise ParseError(f"{path}: {exc.msg} at byte offset {offset}") from exc
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: top-level JSON value must be an object")
    return doc, raw


def _pair(x, where: str) -> complex:
    if (
        not isinstance(x, list)
        or len(x) != 2
        or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in x)
    ):
        raise ParseError(f"{where}: expected [re, im] pair of numbers, got {x!r}")
    if not all(math.isfinite(v) for v in x):
        raise ParseError(f"{where}: non-finite entry")
    return complex(float(x[0]), float(x[1]))


def _dim(doc: dict, path) -> int:
    dim = doc.get("dim")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise ParseError(f"{path}: 'dim' must be a positive integer")
    return dim


def sha256(raw: bytes) -> str:
    return hashlib.sha256(raw).hexdigest()


def read_operator(path) -> tuple[np.ndarray, dict]:
    """Return ``(matrix, meta)``; ``meta`` has ``label``, ``dim`` and ``sha256``."""
    doc, raw = _load(path)
    dim = _dim(doc, path)
    rows = doc.get("matrix")
    if not isinstance(rows, list) or len(rows) != dim:
        raise DimensionMismatch(f"{path}: 'matrix' must have {dim} rows")
    M = np.empty((dim, dim), dtype=complex)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != dim:
            raise DimensionMismatch(f"{path}: row {i} must have {dim} entries")
        for j, x in enumerate(row):
            M[i, j] = _pair(x, f"{path}: entry ({i}, {j})")
    meta = {"label": str(doc.get("label", Path(path).stem)), "dim": dim, "sha256": sha256(raw)}
    return M, meta


def read_state(path) -> tuple[np.ndarray, dict]:
    doc, raw = _load(path)
    dim = _dim(doc, path)
    vec = doc.get("vector")
    if not isinstance(vec, list) or len(vec) != dim:
        raise DimensionMismatch(f"{path}: 'vector' must have {dim} entries")
    v = np.array([_pair(x, f"{path}: entry {i}") for i, x in enumerate(vec)], dtype=complex)
    meta = {"label": str(doc.get("label", Path(path).stem)), "dim": dim, "sha256": sha256(raw)}
    return v, meta


def _pairs(values) -> list:
    return [[float(z.real), float(z.imag)] for z in values]


def operator_document(M, label: str | None = None) -> dict:
    M = np.asarray(M, dtype=complex)
    doc = {"dim": int(M.shape[0])}
    if label is not None:
        doc["label"] = label
    doc["matrix"] = [_pairs(row) for row in M]
    return doc


def write_operator(path, M, label: str | None = None) -> None:
    atomic_write(path, json.dumps(operator_document(M, label)) + "\n")


def write_state(path, v, label: str | None = None) -> None:
    v = np.asarray(v, dtype=complex)
    doc = {"dim": int(v.shape[0])}
    if label is not None:
        doc["label"] = label
    doc["vector"] = _pairs(v)
    atomic_write(path, json.dumps(doc) + "\n")


def atomic_write(path, text: str) -> None:
    """Write ``text`` to ``path`` via a temporary file and rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def fmt(x) -> str:
    """17 significant digits: enough to round-trip any double."""
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return "%.17g" % float(x)


def csv_line(values) -> str:
    return ",".join(fmt(v) for v in values)
