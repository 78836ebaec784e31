"""Order-p ordered statistics decoding on a full-rank parity-check matrix."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import comb

import numpy as np

from .bch import CodeSpec, Permutation, standard_pcm
from .gf2 import as_bits, rank
from .outcome import BatchOutcome, DecodeOutcome, Stage


@dataclass(frozen=True)
class OsdConfig:
    """Order ``p`` and the code; the matrix defaults to the standard PCM."""

    order: int
    code: CodeSpec
    full_rank_pcm: np.ndarray | None = None
    pcm_rank: int = field(init=False, repr=False)

    def __post_init__(self):
        if self.order < 0:
            raise ValueError("OSD order must be non-negative")
        if self.order > self.code.k:
            raise ValueError(f"OSD order {self.order} exceeds K={self.code.k}")
        h = standard_pcm(self.code) if self.full_rank_pcm is None else as_bits(self.full_rank_pcm)
        m = self.code.n - self.code.k
        if h.shape != (m, self.code.n):
            raise ValueError(f"OSD needs an {m}x{self.code.n} matrix, got {h.shape[0]}x{h.shape[1]}")
        r = rank(h)
        if r != m:
            raise ValueError(f"OSD matrix has rank {r} < {m}")
        object.__setattr__(self, "full_rank_pcm", h)
        object.__setattr__(self, "pcm_rank", r)

    @property
    def candidates(self) -> int:
        return sum(comb(self.code.k, w) for w in range(self.order + 1))


@dataclass(frozen=True)
class SystematizedCode:
    """``matrix = [I | P]`` after column permutation ``perm``.

    ``columns[k]`` is the original coordinate at systematic position ``k``;
    the last K positions form the most reliable basis.
    """

    matrix: np.ndarray
    columns: np.ndarray
    swaps: tuple[tuple[int, int], ...]

    @property
    def perm(self) -> Permutation:
        dest = np.empty_like(self.columns)
        dest[self.columns] = np.arange(self.columns.size)
        return Permutation(dest)

    @property
    def mrb(self) -> np.ndarray:
        return self.columns[self.matrix.shape[0]:]


def reliability_order(llr) -> Permutation:
    """Permutation placing positions in ascending ``|llr|`` (stable).

    ``apply_perm`` of the result lists the least reliable bit first;
    ``.source`` is the gather order itself.
    """
    order = np.argsort(np.abs(np.asarray(llr, dtype=np.float64)), kind="stable")
    dest = np.empty_like(order)
    dest[order] = np.arange(order.size)
    return Permutation(dest)


def systematize(pcm, order: Permutation) -> SystematizedCode:
    """Gauss-Jordan elimination of the column-permuted matrix.

    Pivots are taken left to right.  A column without a pivot is swapped
    with the nearest column to its right that has one; every swap is kept.
    """
    h = as_bits(pcm)
    m, n = h.shape
    cols = order.source.copy()
    a = h[:, cols].copy()
    swaps = []
    for r in range(m):
        hit = np.flatnonzero(a[r:, r:].any(axis=0))
        if hit.size == 0:
            raise ValueError(f"parity-check matrix is rank deficient (rank {r} < {m})")
        j = r + int(hit[0])
        if j != r:
            a[:, [r, j]] = a[:, [j, r]]
            cols[[r, j]] = cols[[j, r]]
            swaps.append((r, j))
        p = r + int(np.flatnonzero(a[r:, r])[0])
        if p != r:
            a[[r, p]] = a[[p, r]]
        rows = np.flatnonzero(a[:, r])
        rows = rows[rows != r]
        a[rows] ^= a[r]
    return SystematizedCode(a, cols, tuple(swaps))


@lru_cache(maxsize=None)
def _flip_sets(k: int, w: int) -> np.ndarray:
    return np.array(list(combinations(range(k), w)), dtype=np.int64).reshape(-1, w)


def osd_decode(y, llr, cfg: OsdConfig) -> DecodeOutcome:
    """Most-correlated codeword among all MRB flip patterns of weight <= p.

    Ties keep the earliest candidate: lower flip weight first, then
    ``itertools.combinations`` order over the MRB positions.
    """
    y = np.asarray(y, dtype=np.float64)
    llr = np.asarray(llr, dtype=np.float64)
    n, k = cfg.code.n, cfg.code.k
    if y.shape != (n,) or llr.shape != (n,):
        raise ValueError(f"frame length must be {n}")
    m = n - k
    sysc = systematize(cfg.full_rank_pcm, reliability_order(llr))
    p_t = sysc.matrix[:, m:].T.astype(np.uint8)      # (K, M): parity contribution per MRB bit
    z = (llr[sysc.columns] < 0).astype(np.uint8)     # hard decisions, systematic order
    # cost of disagreeing with z at each position; correlation = total - 2 * cost
    a = y[sysc.columns] * (1.0 - 2.0 * z)
    a_par, a_mrb = a[:m], a[m:]
    base = ((p_t.T.astype(np.int64) @ z[m:]) & 1).astype(np.uint8) ^ z[:m]

    best_cost, best_flip = float(base @ a_par), np.zeros(0, dtype=np.int64)
    for w in range(1, cfg.order + 1):
        flips = _flip_sets(k, w)
        par = base ^ np.bitwise_xor.reduce(p_t[flips], axis=1)
        cost = par @ a_par + a_mrb[flips].sum(axis=1)
        i = int(np.argmin(cost))
        if cost[i] < best_cost:
            best_cost, best_flip = float(cost[i]), flips[i]

    c_mrb = z[m:].copy()
    c_mrb[best_flip] ^= 1
    c_par = ((p_t.T.astype(np.int64) @ c_mrb) & 1).astype(np.uint8)
    word = np.empty(n, dtype=np.uint8)
    word[sysc.columns] = np.concatenate([c_par, c_mrb])
    return DecodeOutcome(word, 0, True, Stage.OSD, (1.0 - 2.0 * word) * np.abs(llr))


def osd_decode_batch(y, llr, cfg: OsdConfig) -> BatchOutcome:
    y = np.atleast_2d(y)
    llr = np.atleast_2d(llr)
    out = BatchOutcome.stack([osd_decode(y[i], llr[i], cfg) for i in range(y.shape[0])])
    return out


def correlation(y, word) -> float:
    """``sum_i y_i (1 - 2 c_i)``, the BPSK correlation of a candidate."""
    return float(np.asarray(y, dtype=np.float64) @ (1.0 - 2.0 * np.asarray(word, dtype=np.float64)))
