"""Construction of a low-density, redundant parity-check matrix H_o.

Pipeline: echelon form of the standard matrix, density reduction by row
sums, repeated search over sums with cyclic shifts, redundancy padding by
a factor ``beta`` and simulated-annealing placement of row shifts that
trades off length-4 cycles against column-weight variance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from numba import njit

from .bch import CodeSpec, standard_pcm
from .gf2 import (
    _rank_of_ints,
    _rotation_index,
    _rows_as_ints,
    as_bits,
    canonical_cyclic_forms,
    count_length4_cycles,
    pack_rows,
    popcount,
    rank,
    row_echelon,
    weight_profile,
    WeightProfile,
)

# Base sizes M_r1 implied by the row counts M_o = M_r1 + beta (M - M_r1) of the
# published matrices.  The search itself usually finds more classes than this.
TABLE_BASE_ROWS = {(63, 36): 22, (63, 45): 3, (127, 64): 54, (127, 78): 41, (127, 99): 23}


@dataclass(frozen=True)
class CandidatePool:
    """Low-weight dual codewords, one canonical representative per cyclic class.

    Rows are sorted by weight, then lexicographically.
    """

    rows: np.ndarray

    @classmethod
    def from_vectors(cls, vectors) -> "CandidatePool":
        v = np.atleast_2d(as_bits(vectors))
        v = v[v.any(axis=1)]
        if v.size == 0:
            raise ValueError("candidate pool would be empty")
        v = np.unique(v, axis=0)
        canon = np.unique(canonical_cyclic_forms(v), axis=0)
        w = canon.sum(axis=1)
        order = np.lexsort(tuple(canon[:, ::-1].T) + (w,))
        return cls(canon[order])

    @property
    def weights(self) -> np.ndarray:
        return self.rows.sum(axis=1).astype(np.int64)

    @property
    def min_weight(self) -> int:
        return int(self.weights.min())

    def __len__(self) -> int:
        return self.rows.shape[0]

    def same_classes(self, other: "CandidatePool") -> bool:
        return self.rows.shape == other.rows.shape and np.array_equal(self.rows, other.rows)


def _lightest_sums(r_i: np.ndarray, cands: np.ndarray, cand_w: np.ndarray) -> np.ndarray:
    """Result set S_f of one pass of the inner search loop for row ``r_i``.

    Sequentially: start from ``{r_i}`` at weight ``||r_i||``; candidates of
    equal weight join, strictly lighter ones reset the set.  Order does not
    change the final set, so it is computed in one shot.
    """
    w_i = int(r_i.sum())
    keep = cand_w > 0
    if not keep.any():
        return r_i[None, :]
    w_g = min(w_i, int(cand_w[keep].min()))
    chosen = np.flatnonzero(keep & (cand_w == w_g))
    out = cands(chosen) if callable(cands) else cands[chosen]
    if w_i == w_g:
        out = np.vstack([r_i[None, :], out])
    return out


def reduce_density(h_r) -> CandidatePool:
    """Pairwise row-sum search on an echelon-form matrix.

    For every row ``r_i`` the lightest vectors among ``r_i`` and
    ``r_i + r_j`` (``j != i``) are collected; the union over ``i`` forms the
    pool, deduplicated up to cyclic shifts.
    """
    rows = as_bits(h_r)
    rows = rows[rows.any(axis=1)]
    found = []
    for i in range(rows.shape[0]):
        others = np.delete(rows, i, axis=0)
        t = others ^ rows[i]
        found.append(_lightest_sums(rows[i], t, t.sum(axis=1)))
    return CandidatePool.from_vectors(np.vstack(found))


@njit(cache=True)
def _popcount64(x):
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return (x * np.uint64(0x0101010101010101)) >> np.uint64(56)


@njit(cache=True)
def _shift_search(packed, own, own_w):
    # packed[j, q] = shift(r_j, q); returns the lightest weight per row and the
    # (i, j, q) triples that attain it
    p, n, n_words = packed.shape
    best = own_w.copy()
    for i in range(p):
        for j in range(p):
            if j == i:
                continue
            for q in range(n):
                w = 0
                for k in range(n_words):
                    w += _popcount64(packed[j, q, k] ^ own[i, k])
                if 0 < w < best[i]:
                    best[i] = w
    count = 0
    for i in range(p):
        for j in range(p):
            if j == i:
                continue
            for q in range(n):
                w = 0
                for k in range(n_words):
                    w += _popcount64(packed[j, q, k] ^ own[i, k])
                if w == best[i]:
                    count += 1
    hits = np.empty((count, 3), dtype=np.int64)
    c = 0
    for i in range(p):
        for j in range(p):
            if j == i:
                continue
            for q in range(n):
                w = 0
                for k in range(n_words):
                    w += _popcount64(packed[j, q, k] ^ own[i, k])
                if w == best[i]:
                    hits[c, 0] = i
                    hits[c, 1] = j
                    hits[c, 2] = q
                    c += 1
    return best, hits


def search_with_shifts(rows) -> np.ndarray:
    """One round of the shifted search: candidates ``r_i + shift(r_j, q)``.

    Returns the raw union of the per-row result sets (exact duplicates
    removed, cyclic duplicates kept).
    """
    rows = as_bits(rows)
    p, n = rows.shape
    if p == 1:
        return rows.copy()
    shifted = rows[:, _rotation_index(n)]                   # (P, N, N), [j, q] = shift(r_j, q)
    packed = pack_rows(shifted.reshape(p * n, n)).reshape(p, n, -1)
    own_w = rows.sum(axis=1).astype(np.int64)
    own = pack_rows(rows)
    best, hits = _shift_search(packed, own, own_w)
    words = packed[hits[:, 1], hits[:, 2]] ^ own[hits[:, 0]]
    words = np.unique(np.vstack([own[best == own_w], words]), axis=0)
    bits = np.unpackbits(words.view(np.uint8), axis=1, bitorder="little")[:, :n]
    return np.unique(bits, axis=0)


def cyclic_refine(pool: CandidatePool, rounds: int = 4) -> CandidatePool:
    """Repeat the density search ``rounds`` times with shifted partners.

    Each round restarts from the previous round's pool; the search stops
    early once the pool reaches a fixed point.
    """
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    for _ in range(rounds):
        nxt = CandidatePool.from_vectors(search_with_shifts(pool.rows))
        if nxt.same_classes(pool):
            break
        pool = nxt
    return pool


def base_size(pool: CandidatePool, spec: CodeSpec, base_rows: int | None = None) -> int:
    """Number of pool classes M_r1 forming the base of H_o."""
    if base_rows is None:
        base_rows = TABLE_BASE_ROWS.get((spec.n, spec.k), spec.redundancy)
    if base_rows < 1:
        raise ValueError("base_rows must be positive")
    return min(base_rows, len(pool))


def select_base(pool: CandidatePool, spec: CodeSpec, base_rows: int | None = None) -> np.ndarray:
    """Pick M_r1 classes in pool order, rank-increasing classes first.

    A single pass in ascending weight keeps every class that raises the
    rank; if fewer than M_r1 were kept, the skipped classes fill the rest
    in pool order.  The result is sorted back into pool order.
    """
    m_r1 = base_size(pool, spec, base_rows)
    ints = _rows_as_ints(pool.rows)
    kept, skipped, basis = [], [], []
    cur = 0
    for idx, v in enumerate(ints):
        if len(kept) == m_r1:
            break
        r = _rank_of_ints(basis + [v])
        if r > cur:
            kept.append(idx)
            basis.append(v)
            cur = r
        else:
            skipped.append(idx)
    kept += skipped[:m_r1 - len(kept)]
    return pool.rows[sorted(kept)]


def _padding_stream(base: np.ndarray):
    """Round-robin over base rows in pool order, each visit the next shift."""
    n = base.shape[1]
    for q in range(1, n):
        for row in base:
            yield np.roll(row, q)


def _extension_stream(extra: np.ndarray):
    for row in extra:
        n = row.shape[0]
        for q in range(n):
            yield np.roll(row, q)


def pad_redundancy(pool: CandidatePool, spec: CodeSpec, beta: int,
                   base_rows: int | None = None) -> np.ndarray:
    """Base of M_r1 pool rows plus ``beta * (M - M_r1)`` shifted rows.

    Padding rows are shifts of the base rows taken round-robin in ascending
    weight order.  Rows that restore full rank ``M = N - K`` are placed
    first; if the base classes cannot span the dual code, shifts of the
    remaining pool classes are admitted for that purpose.
    """
    if beta < 1:
        raise ValueError("beta must be >= 1")
    m_full = spec.redundancy
    base = select_base(pool, spec, base_rows)
    m_r1 = base.shape[0]
    n_pad = max(0, beta * (m_full - m_r1))

    chosen = [row for row in base]
    seen = {row.tobytes() for row in chosen}
    ints = _rows_as_ints(base)
    cur_rank = _rank_of_ints(ints)
    pads: list[np.ndarray] = []

    def streams():
        yield from _padding_stream(base)
        used = {row.tobytes() for row in base}
        yield from _extension_stream(np.array([r for r in pool.rows if r.tobytes() not in used]))

    if cur_rank < m_full:
        for cand in streams():
            if len(pads) == n_pad or cur_rank == m_full:
                break
            key = cand.tobytes()
            if key in seen:
                continue
            trial = _rank_of_ints(ints + _rows_as_ints(cand[None, :]))
            if trial > cur_rank:
                pads.append(cand)
                seen.add(key)
                ints += _rows_as_ints(cand[None, :])
                cur_rank = trial
        if cur_rank < m_full:
            raise ValueError(
                f"cannot reach rank {m_full}: rank {cur_rank} after {len(pads)} padding rows "
                f"(beta={beta} allows {n_pad}); shortfall {m_full - cur_rank}")

    if len(pads) < n_pad:
        for cand in _padding_stream(base):
            key = cand.tobytes()
            if key in seen:
                continue
            pads.append(cand)
            seen.add(key)
            if len(pads) == n_pad:
                break
    if len(pads) < n_pad:
        raise ValueError(f"pool supplies only {len(pads)} of {n_pad} padding rows; "
                         f"shortfall {n_pad - len(pads)}")
    return np.vstack(chosen + pads) if pads else np.array(chosen, dtype=np.uint8)


@dataclass(frozen=True)
class AnnealConfig:
    """Schedule and loss weights for :func:`anneal_layout`.

    ``None`` fields are derived from the input matrix: ``w_var`` defaults to
    the initial cycle count divided by N, ``t0`` to 5% of the initial loss
    and ``max_steps`` to 200 steps per row.
    """

    max_steps: int | None = None
    t0: float | None = None
    cooling: float = 0.999
    w_cycles: float = 1.0
    w_var: float | None = None
    seed: int = 0
    restarts: int = 1

    def __post_init__(self):
        if not 0.0 < self.cooling < 1.0:
            raise ValueError("cooling factor must lie in (0, 1)")
        if self.w_cycles <= 0 or (self.w_var is not None and self.w_var < 0):
            raise ValueError("loss weights must be positive")
        if self.max_steps is not None and self.max_steps < 0:
            raise ValueError("max_steps must be non-negative")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")


def layout_loss(m, w_cycles: float, w_var: float) -> float:
    m = as_bits(m)
    return w_cycles * count_length4_cycles(m) + w_var * float(m.sum(axis=0).var())


def resolve_anneal_config(m, cfg: AnnealConfig) -> AnnealConfig:
    m = as_bits(m)
    cycles = count_length4_cycles(m)
    w_var = cfg.w_var if cfg.w_var is not None else cycles / m.shape[1]
    loss0 = cfg.w_cycles * cycles + w_var * float(m.sum(axis=0).var())
    return replace(
        cfg,
        w_var=w_var,
        t0=cfg.t0 if cfg.t0 is not None else max(0.05 * loss0, 1e-9),
        max_steps=cfg.max_steps if cfg.max_steps is not None else 200 * m.shape[0],
    )


def _anneal_once(m: np.ndarray, cfg: AnnealConfig, seed) -> tuple[np.ndarray, float]:
    rng = np.random.default_rng(seed)
    m = as_bits(m).copy()
    rows, n = m.shape
    packed = pack_rows(m)
    lam = popcount(packed[:, None, :] & packed[None, :, :])
    np.fill_diagonal(lam, 0)
    pair = lam * (lam - 1) // 2
    involve = pair.sum(axis=1)
    cycles = int(involve.sum()) // 2
    colw = m.sum(axis=0).astype(np.int64)
    rank_floor = rank(m)
    ints = _rows_as_ints(m)

    def loss(c, cw):
        return cfg.w_cycles * c + cfg.w_var * float(cw.var())

    cur = loss(cycles, colw)
    best, best_m = cur, m.copy()
    temp = cfg.t0
    for _ in range(cfg.max_steps):
        tot = involve.sum()
        r = int(rng.choice(rows, p=involve / tot)) if tot > 0 else int(rng.integers(rows))
        q = int(rng.integers(1, n)) if n > 1 else 0
        new_row = np.roll(m[r], q)
        new_p = pack_rows(new_row[None, :])[0]
        new_lam = popcount(packed & new_p)
        new_lam[r] = 0
        new_pair = new_lam * (new_lam - 1) // 2
        d_cycles = int(new_pair.sum() - pair[r].sum())
        new_colw = colw + new_row.astype(np.int64) - m[r]
        cand = loss(cycles + d_cycles, new_colw)
        delta = cand - cur
        temp *= cfg.cooling
        if delta > 0 and rng.random() >= math.exp(-delta / max(temp, 1e-300)):
            continue
        new_int = _rows_as_ints(new_row[None, :])[0]
        if new_int != ints[r]:
            trial = ints[:r] + [new_int] + ints[r + 1:]
            if _rank_of_ints(trial) < rank_floor:
                continue
            ints = trial
        m[r] = new_row
        packed[r] = new_p
        involve += new_pair - pair[r]
        involve[r] = new_pair.sum()
        pair[r, :] = new_pair
        pair[:, r] = new_pair
        lam[r, :] = new_lam
        lam[:, r] = new_lam
        cycles += d_cycles
        colw = new_colw
        cur = cand
        if cur < best:
            best, best_m = cur, m.copy()
    return best_m, best


def anneal_layout(m, cfg: AnnealConfig | None = None, return_loss: bool = False):
    """Simulated annealing over per-row cyclic shifts.

    Each step picks a row with probability proportional to the length-4
    cycles it takes part in and proposes a random cyclic shift of it.
    Moves that would lower the rank are rejected.  The best matrix seen
    over all restarts is returned (ties go to the earliest restart).
    """
    cfg = resolve_anneal_config(m, cfg or AnnealConfig())
    best_m, best = as_bits(m).copy(), layout_loss(m, cfg.w_cycles, cfg.w_var)
    for restart in range(cfg.restarts):
        cand_m, cand = _anneal_once(m, cfg, [cfg.seed, restart])
        if cand < best:
            best_m, best = cand_m, cand
    return (best_m, best) if return_loss else best_m


@dataclass(frozen=True)
class OptimizedPcm:
    """H_o together with the bookkeeping of how it was built."""

    matrix: np.ndarray
    beta: int
    profile: WeightProfile
    spec: CodeSpec
    base_rows: int
    pool_size: int
    pool_weights: tuple[int, ...] = field(default=())

    @property
    def rows(self) -> int:
        return self.matrix.shape[0]


def build_pool(spec: CodeSpec, rounds: int = 4) -> CandidatePool:
    """Echelon form, density reduction, then ``rounds`` shifted searches."""
    h_r, _ = row_echelon(standard_pcm(spec), reduced=True)
    return cyclic_refine(reduce_density(h_r), rounds)


def build_optimized_pcm(spec: CodeSpec, beta: int = 2, rounds: int = 4,
                        cfg: AnnealConfig | None = None, base_rows: int | None = None,
                        pool: CandidatePool | None = None) -> OptimizedPcm:
    """Full H_o construction for ``spec``.

    ``pool`` may be passed to reuse an expensive search across several
    values of ``beta``.
    """
    if pool is None:
        pool = build_pool(spec, rounds)
    padded = pad_redundancy(pool, spec, beta, base_rows)
    matrix = anneal_layout(padded, cfg or AnnealConfig())
    m_r1 = base_size(pool, spec, base_rows)
    return OptimizedPcm(
        matrix=matrix,
        beta=beta,
        profile=weight_profile(matrix),
        spec=spec,
        base_rows=m_r1,
        pool_size=len(pool),
        pool_weights=tuple(sorted(set(int(w) for w in pool.weights))),
    )


def rank_deficiency_report(pcm) -> tuple[int, int, bool]:
    """Rank spanned by the minimum-weight rows of ``pcm`` and all their shifts.

    Returns ``(min_weight, rank, rank == N - K)``.  ``pcm`` is an
    :class:`OptimizedPcm` or a bare matrix; for a bare matrix the target
    rank is the matrix's own rank.
    """
    if isinstance(pcm, OptimizedPcm):
        m, target = pcm.matrix, pcm.spec.redundancy
    else:
        m = as_bits(pcm)
        target = rank(m)
    w = m.sum(axis=1)
    w_min = int(w[w > 0].min())
    light = m[w == w_min]
    n = m.shape[1]
    shifts = light[:, _rotation_index(n)].reshape(-1, n)
    r = rank(np.unique(shifts, axis=0))
    return w_min, r, r == target
