"""JSON matrix exchange format.

A matrix file is ``{"rows": n, "cols": m, "data": [[re, im], ...]}`` with
entries in row-major order.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import InvalidMatrixError
from .linalg import as_matrix


def matrix_to_dict(a) -> dict:
    a = np.asarray(a, dtype=np.complex128)
    return {
        "rows": int(a.shape[0]),
        "cols": int(a.shape[1]),
        "data": [[float(z.real), float(z.imag)] for z in a.ravel(order="C")],
    }


def matrix_from_dict(doc: dict) -> np.ndarray:
    try:
        rows, cols, data = int(doc["rows"]), int(doc["cols"]), doc["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidMatrixError("matrix document needs rows, cols and data") from exc
    if len(data) != rows * cols:
        raise InvalidMatrixError(f"expected {rows * cols} entries, got {len(data)}")
    try:
        values = [complex(float(re), float(im)) for re, im in data]
    except (TypeError, ValueError) as exc:
        raise InvalidMatrixError("entries must be [re, im] pairs") from exc
    return as_matrix(np.array(values, dtype=np.complex128).reshape(rows, cols))


def read_matrix(path: str | Path, matrix_market: bool = False) -> np.ndarray:
    if matrix_market:
        import scipy.io

        try:
            mat = scipy.io.mmread(str(path))
        except (ValueError, OSError) as exc:
            raise InvalidMatrixError(f"{path}: unreadable Matrix Market file ({exc})") from exc
        if hasattr(mat, "toarray"):
            mat = mat.toarray()
        return as_matrix(mat)
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidMatrixError(f"{path}: invalid JSON ({exc})") from exc
    return matrix_from_dict(doc)


def dumps_matrix(a) -> str:
    return json.dumps(matrix_to_dict(a))


def write_matrix(path: str | Path, a) -> None:
    Path(path).write_text(dumps_matrix(a) + "\n")
