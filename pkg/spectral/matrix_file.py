"""
Matrix files: JSON `{"rows", "cols", "entries": [[re, im], ...]}` (row-major)
and Matrix Market `array` format (column-major, complex or real).
"""

import hashlib
import json
import math
from pathlib import Path
from typing import List, Tuple

import numpy as np

from spectral.complexmat import as_matrix
from spectral.errors import MatrixFileError
from spectral.serialize import dumps, format_float

MM_HEADER = "%%matrixmarket"


def file_digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _is_number(value) -> bool:
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        return False
    try:
        return math.isfinite(value)
    except OverflowError:
        return False


def parse_json_matrix(text: str, path=None) -> np.ndarray:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MatrixFileError(f"invalid JSON: {exc.msg}", path=path, line=exc.lineno, field="json") from exc
    if not isinstance(payload, dict):
        raise MatrixFileError("matrix JSON must be an object", path=path, line=1, field="root")

    dims = []
    for key in ("rows", "cols"):
        value = payload.get(key)
        if not isinstance(value, int) or isinstance(value, bool) or value < 1:
            raise MatrixFileError(f"'{key}' must be a positive integer", path=path, field=key)
        dims.append(value)
    rows, cols = dims

    entries = payload.get("entries")
    if not isinstance(entries, list):
        raise MatrixFileError("'entries' must be a list", path=path, field="entries")
    if len(entries) != rows * cols:
        raise MatrixFileError(
            f"'entries' has {len(entries)} items, expected rows*cols = {rows * cols}",
            path=path,
            field="entries",
        )
    values = np.empty(rows * cols, dtype=np.complex128)
    for i, entry in enumerate(entries):
        if not isinstance(entry, list) or len(entry) != 2 or not all(_is_number(v) for v in entry):
            raise MatrixFileError(
                "each entry must be a pair [re, im] of finite numbers", path=path, field=f"entries[{i}]"
            )
        values[i] = complex(entry[0], entry[1])
    return values.reshape(rows, cols)


def parse_matrix_market(text: str, path=None) -> np.ndarray:
    lines = text.splitlines()
    if not lines or not lines[0].lower().startswith(MM_HEADER):
        raise MatrixFileError("missing %%MatrixMarket header", path=path, line=1, field="header")
    header = lines[0].lower().split()
    if len(header) != 5 or header[1:3] != ["matrix", "array"] or header[4] != "general":
        raise MatrixFileError(
            "only 'matrix array <complex|real> general' is supported", path=path, line=1, field="header"
        )
    field = header[3]
    if field not in ("complex", "real"):
        raise MatrixFileError(f"unsupported field '{field}'", path=path, line=1, field="header")
    width = 2 if field == "complex" else 1

    body: List[Tuple[int, List[str]]] = [
        (number, line.split())
        for number, line in enumerate(lines[1:], start=2)
        if line.strip() and not line.lstrip().startswith("%")
    ]
    if not body:
        raise MatrixFileError("missing size line", path=path, line=len(lines), field="size")
    size_line, size = body[0]
    try:
        rows, cols = (int(v) for v in size)
    except ValueError:
        raise MatrixFileError("size line must be 'rows cols'", path=path, line=size_line, field="size")
    if rows < 1 or cols < 1:
        raise MatrixFileError("dimensions must be positive", path=path, line=size_line, field="size")

    data = body[1:]
    if len(data) != rows * cols:
        last = data[-1][0] if data else size_line
        raise MatrixFileError(
            f"expected {rows * cols} entries, found {len(data)}", path=path, line=last, field="entries"
        )
    A = np.empty((rows, cols), dtype=np.complex128)
    for k, (number, tokens) in enumerate(data):
        try:
            parts = [float(t) for t in tokens]
        except ValueError:
            parts = []
        if len(parts) != width or not all(math.isfinite(p) for p in parts):
            raise MatrixFileError(
                f"entry must be {width} finite number(s)", path=path, line=number, field=f"entries[{k}]"
            )
        A[k % rows, k // rows] = complex(parts[0], parts[1] if width == 2 else 0.0)
    return A


def parse_matrix(text: str, path=None) -> np.ndarray:
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return parse_json_matrix(text, path)
    if stripped.lower().startswith(MM_HEADER):
        return parse_matrix_market(text, path)
    raise MatrixFileError("unrecognized matrix format", path=path, line=1, field="header")


def load_matrix(path) -> Tuple[np.ndarray, str]:
    """Read a matrix file; returns the matrix and the SHA-256 of its bytes."""
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise MatrixFileError(f"cannot read {path}: {exc.strerror}", path=path, field="path") from exc
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise MatrixFileError("file is not UTF-8 text", path=path, field="encoding") from exc
    return parse_matrix(text, path), file_digest(data)


def matrix_json(A) -> str:
    A = as_matrix(A)
    return dumps({"rows": A.shape[0], "cols": A.shape[1], "entries": [[z.real, z.imag] for z in A.ravel()]})


def matrix_market(A) -> str:
    A = as_matrix(A)
    rows, cols = A.shape
    out = ["%%MatrixMarket matrix array complex general", f"{rows} {cols}"]
    for j in range(cols):
        for i in range(rows):
            out.append(f"{format_float(A[i, j].real)} {format_float(A[i, j].imag)}")
    return "\n".join(out) + "\n"


def write_matrix(A, path, fmt: str = "json") -> None:
    text = matrix_market(A) if fmt == "matrix-market" else matrix_json(A)
    Path(path).write_text(text)
