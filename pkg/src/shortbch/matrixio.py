"""Reading and writing bit matrices as alist or dense 0/1 text."""

from __future__ import annotations

import io
from pathlib import Path

import numpy as np


class MatrixFormatError(ValueError):
    """Raised when a matrix file cannot be parsed."""


def to_alist(h) -> str:
    """Serialize ``h`` in alist format.

    Layout: ``N M``, the max column/row degrees, the column degrees, the
    row degrees, then one line of 1-based row indices per column and one
    line of 1-based column indices per row.  Short lists are zero padded
    to the max degree.
    """
    h = np.asarray(h, dtype=np.uint8)
    m, n = h.shape
    col_sets = [np.flatnonzero(h[:, j]) + 1 for j in range(n)]
    row_sets = [np.flatnonzero(h[i]) + 1 for i in range(m)]
    max_col = max((len(s) for s in col_sets), default=0)
    max_row = max((len(s) for s in row_sets), default=0)

    def padded(s, width):
        # an all-zero matrix still gets one padding entry per line
        return " ".join(str(int(x)) for x in list(s) + [0] * (max(width, 1) - len(s)))

    out = io.StringIO()
    out.write(f"{n} {m}\n{max_col} {max_row}\n")
    out.write(" ".join(str(len(s)) for s in col_sets) + "\n")
    out.write(" ".join(str(len(s)) for s in row_sets) + "\n")
    for s in col_sets:
        out.write(padded(s, max_col) + "\n")
    for s in row_sets:
        out.write(padded(s, max_row) + "\n")
    return out.getvalue()


def from_alist(text: str) -> np.ndarray:
    """Parse alist text into a dense ``uint8`` matrix.

    Zero entries in adjacency lists are treated as padding.  The row
    lists must agree with the column lists.
    """
    lines = [ln.split() for ln in text.strip().splitlines() if ln.strip()]
    try:
        n, m = (int(x) for x in lines[0][:2])
        col_deg = [int(x) for x in lines[2]]
        row_deg = [int(x) for x in lines[3]]
        if len(col_deg) != n or len(row_deg) != m or len(lines) < 4 + n + m:
            raise MatrixFormatError("alist header does not match its body")
        h = np.zeros((m, n), dtype=np.uint8)
        for j in range(n):
            rows = [int(x) for x in lines[4 + j] if int(x) != 0]
            if len(rows) != col_deg[j]:
                raise MatrixFormatError(f"column {j + 1}: degree {col_deg[j]} but {len(rows)} entries")
            h[np.array(rows, dtype=int) - 1, j] = 1
        check = np.zeros_like(h)
        for i in range(m):
            cols = [int(x) for x in lines[4 + n + i] if int(x) != 0]
            if len(cols) != row_deg[i]:
                raise MatrixFormatError(f"row {i + 1}: degree {row_deg[i]} but {len(cols)} entries")
            check[i, np.array(cols, dtype=int) - 1] = 1
    except (IndexError, ValueError) as exc:
        if isinstance(exc, MatrixFormatError):
            raise
        raise MatrixFormatError(f"malformed alist: {exc}") from exc
    if not np.array_equal(h, check):
        raise MatrixFormatError("alist row and column adjacency lists disagree")
    return h


def to_dense_text(h) -> str:
    """One row per line, bits written without separators."""
    h = np.asarray(h, dtype=np.uint8)
    return "".join("".join("1" if b else "0" for b in row) + "\n" for row in h)


def from_dense_text(text: str) -> np.ndarray:
    # digits may be packed ("0110") or separated by spaces
    rows = ["".join(ln.split()) for ln in text.splitlines() if ln.strip()]
    if not rows or len({len(r) for r in rows}) != 1 or any(set(r) - {"0", "1"} for r in rows):
        raise MatrixFormatError("dense matrix text must be equal-length lines of 0/1")
    return np.array([[c == "1" for c in r] for r in rows], dtype=np.uint8)


def write_matrix(path, h) -> None:
    """Write ``h`` as alist (``.alist``) or dense text (anything else)."""
    path = Path(path)
    text = to_alist(h) if path.suffix == ".alist" else to_dense_text(h)
    path.write_text(text)


def read_matrix(path) -> np.ndarray:
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".alist":
        return from_alist(text)
    return from_dense_text(text)
