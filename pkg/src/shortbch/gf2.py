"""Dense GF(2) linear algebra on numpy ``uint8`` arrays.

Bit vectors are 1-D arrays with values in {0, 1}; bit matrices are 2-D.
Row overlaps are computed on rows packed into ``uint64`` words so that the
length-4 cycle count reduces to popcounts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit


def as_bits(a) -> np.ndarray:
    """Return ``a`` as a contiguous ``uint8`` array reduced mod 2."""
    return np.ascontiguousarray(np.asarray(a, dtype=np.int64) % 2, dtype=np.uint8)


def pack_rows(m: np.ndarray) -> np.ndarray:
    """Pack the rows of a bit matrix into little-endian ``uint64`` words.

    Returns an array of shape ``(M, ceil(N / 64))``.
    """
    m = np.atleast_2d(np.asarray(m, dtype=np.uint8))
    rows, n = m.shape
    n_words = max(1, -(-n // 64))
    padded = np.zeros((rows, n_words * 64), dtype=np.uint8)
    padded[:, :n] = m
    packed = np.packbits(padded, axis=1, bitorder="little")
    return packed.view("<u8").reshape(rows, n_words)


def popcount(words: np.ndarray) -> np.ndarray:
    """Hamming weight summed over the last axis of a packed word array."""
    return np.bitwise_count(words).sum(axis=-1, dtype=np.int64)


def row_echelon(m, reduced: bool = False) -> tuple[np.ndarray, int]:
    """Row echelon form of ``m`` over GF(2).

    Zero rows are moved to the bottom, so the returned matrix has the same
    shape as ``m``.  With ``reduced=True`` the pivot columns are also
    cleared above each pivot.
    """
    r = as_bits(m).copy()
    if r.ndim != 2 or r.size == 0:
        raise ValueError("row_echelon expects a non-empty 2-D matrix")
    n_rows, n_cols = r.shape
    pivot_row = 0
    for col in range(n_cols):
        if pivot_row == n_rows:
            break
        hits = np.flatnonzero(r[pivot_row:, col])
        if hits.size == 0:
            continue
        p = pivot_row + hits[0]
        if p != pivot_row:
            r[[pivot_row, p]] = r[[p, pivot_row]]
        mask = r[:, col].astype(bool)
        mask[pivot_row] = False
        if not reduced:
            mask[:pivot_row] = False
        r[mask] ^= r[pivot_row]
        pivot_row += 1
    return r, pivot_row


def rank(m) -> int:
    """GF(2) rank of a bit matrix."""
    m = np.atleast_2d(as_bits(m))
    if m.size == 0:
        return 0
    return _rank_of_ints(_rows_as_ints(m))


def _rows_as_ints(m: np.ndarray) -> list[int]:
    packed = np.packbits(m, axis=1, bitorder="little")
    return [int.from_bytes(row.tobytes(), "little") for row in packed]


def _rank_of_ints(rows: list[int]) -> int:
    # xor basis keyed by leading bit
    basis: dict[int, int] = {}
    for v in rows:
        while v:
            top = v.bit_length() - 1
            b = basis.get(top)
            if b is None:
                basis[top] = v
                break
            v ^= b
    return len(basis)


def overlap_matrix(m) -> np.ndarray:
    """Pairwise support overlaps ``|supp(row i) & supp(row j)|`` as int64."""
    p = pack_rows(as_bits(m))
    return popcount(p[:, None, :] & p[None, :, :])


def count_length4_cycles(m) -> int:
    """Number of length-4 cycles in the Tanner graph of ``m``.

    Every unordered row pair sharing ``lam`` columns contributes
    ``lam choose 2`` cycles.
    """
    lam = overlap_matrix(m)
    iu = np.triu_indices(lam.shape[0], 1)
    pair = lam[iu]
    return int((pair * (pair - 1) // 2).sum())


def cyclic_shift(v, q: int) -> np.ndarray:
    """Shift a bit vector so that ``out[(i + q) % N] = v[i]``."""
    return np.roll(np.asarray(v), q)


def _rotation_index(n: int) -> np.ndarray:
    # row q holds the gather indices of cyclic_shift(., q)
    return (np.arange(n)[None, :] - np.arange(n)[:, None]) % n


def canonical_cyclic_form(v) -> np.ndarray:
    """Lexicographically smallest cyclic shift of ``v``."""
    v = as_bits(v)
    return canonical_cyclic_forms(v[None, :])[0]


@njit(cache=True)
def _min_rotations(vs):
    b, n = vs.shape
    out = np.empty_like(vs)
    for r in range(b):
        best = 0
        for s in range(1, n):
            for k in range(n):
                a = vs[r, (s + k) % n]
                c = vs[r, (best + k) % n]
                if a != c:
                    if a < c:
                        best = s
                    break
        for k in range(n):
            out[r, k] = vs[r, (best + k) % n]
    return out


def canonical_cyclic_forms(vs) -> np.ndarray:
    """Row-wise :func:`canonical_cyclic_form` for a batch of vectors."""
    return _min_rotations(np.atleast_2d(as_bits(vs)))


def syndrome(h, c) -> np.ndarray:
    """``H c^T`` over GF(2); works for a single word or a batch of rows."""
    h = as_bits(h)
    c = np.asarray(c, dtype=np.uint8)
    if c.shape[-1] != h.shape[1]:
        raise ValueError(f"word length {c.shape[-1]} does not match H with {h.shape[1]} columns")
    return ((c.astype(np.int64) @ h.T.astype(np.int64)) & 1).astype(np.uint8)


def syndrome_ok(h, c) -> bool | np.ndarray:
    """True where every parity check of ``h`` is satisfied by ``c``."""
    s = syndrome(h, c)
    return ~s.any(axis=-1) if s.ndim > 1 else not s.any()


@dataclass(frozen=True)
class WeightProfile:
    """Table-style attributes of a parity-check matrix."""

    col_min: int
    col_max: int
    col_mean: float
    col_std: float
    row_min: int
    row_max: int
    row_mean: float
    row_std: float
    cycle4_count: int
    rank: int
    rows: int
    cols: int

    def table_row(self) -> str:
        return (
            f"H({self.rows}x{self.cols})  cycles4={self.cycle4_count}  "
            f"col [{self.col_min},{self.col_max}] / {self.col_mean:.1f} / {self.col_std:.1f}  "
            f"row [{self.row_min},{self.row_max}] / {self.row_mean:.1f} / {self.row_std:.1f}  "
            f"rank={self.rank}"
        )

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def weight_profile(m) -> WeightProfile:
    """Column/row weight statistics (population std), cycles and rank."""
    m = as_bits(m)
    cw = m.sum(axis=0, dtype=np.int64)
    rw = m.sum(axis=1, dtype=np.int64)
    return WeightProfile(
        col_min=int(cw.min()), col_max=int(cw.max()),
        col_mean=float(cw.mean()), col_std=float(cw.std()),
        row_min=int(rw.min()), row_max=int(rw.max()),
        row_mean=float(rw.mean()), row_std=float(rw.std()),
        cycle4_count=count_length4_cycles(m),
        rank=rank(m),
        rows=m.shape[0], cols=m.shape[1],
    )
