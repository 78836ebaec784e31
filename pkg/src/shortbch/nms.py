"""Normalized min-sum decoding, plain and automorphism-dilated.

Both decoders run on batches of frames; the single-frame functions are
thin wrappers.  Check-node updates use the min / second-min trick on a
padded ``(M, d_max)`` edge layout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numba import njit

from .bch import DEFAULT_SHIFT_PERIOD, Permutation, perm_frobenius, perm_interleave
from .channel import (
    DECODER_SIGMA_SQ,
    ChannelConfig,
    llr_init,
    make_frames,
)
from .gf2 import as_bits
from .outcome import BatchOutcome, DecodeOutcome

__all__ = [
    "llr_init", "TannerGraph", "NmsConfig", "check_node_update", "nms_decode",
    "nms_decode_batch", "DilationBlock", "dilate", "merge_extrinsic",
    "enhanced_nms_decode", "enhanced_nms_decode_batch", "draw_offsets", "calibrate_alpha",
]

FAMILIES = ("identity", "interleave", "frobenius")
DEFAULT_ALPHA_GRID = tuple(round(0.05 * i, 2) for i in range(1, 21))


class TannerGraph:
    """Edge layout of a parity-check matrix.

    ``cols[j, e]`` is the variable attached to the ``e``-th edge of check
    ``j`` for ``e < deg[j]``; the rest of the row is padding.
    """

    def __init__(self, h):
        h = as_bits(h)
        self.h = h
        self.m, self.n = h.shape
        self.deg = h.sum(axis=1).astype(np.int64)
        self.d_max = int(self.deg.max())
        self.cols = np.zeros((self.m, self.d_max), dtype=np.int64)
        for j in range(self.m):
            c = np.flatnonzero(h[j])
            self.cols[j, :c.size] = c
        self.mask = np.arange(self.d_max) < self.deg[:, None]
        self._h64 = h.T.astype(np.int64)

    def syndrome_ok(self, hard: np.ndarray) -> np.ndarray:
        return ~((hard.astype(np.int64) @ self._h64) & 1).any(axis=-1)


@njit(cache=True)
def _check_to_var(v2c, deg_j, alpha, clip, out):
    # min-sum with min / second-min and sign parity, clipped output
    min1 = np.inf
    min2 = np.inf
    pos = -1
    neg = 0
    for e in range(deg_j):
        a = abs(v2c[e])
        if v2c[e] < 0:
            neg ^= 1
        if a < min1:
            min2 = min1
            min1 = a
            pos = e
        elif a < min2:
            min2 = a
    for e in range(deg_j):
        mag = min2 if e == pos else min1
        s = neg ^ (1 if v2c[e] < 0 else 0)
        val = alpha * (-mag if s else mag)
        out[e] = min(max(val, -clip), clip)


@njit(cache=True)
def _enhanced_round(y, src, cols, deg, alpha, clip):
    # one dilated iteration: returns the aligned mean of the extrinsic sums
    n_frames, n_rows, n = src.shape
    m, d_max = cols.shape
    merged = np.zeros((n_frames, n))
    block = np.empty(n)
    ext = np.empty(n)
    v2c = np.empty(d_max)
    c2v = np.empty(d_max)
    for a in range(n_frames):
        for d in range(n_rows):
            for k in range(n):
                block[k] = min(max(y[a, src[a, d, k]], -clip), clip)
                ext[k] = 0.0
            for j in range(m):
                for e in range(deg[j]):
                    v2c[e] = block[cols[j, e]]
                _check_to_var(v2c, deg[j], alpha, clip, c2v)
                for e in range(deg[j]):
                    ext[cols[j, e]] += c2v[e]
            for k in range(n):
                merged[a, src[a, d, k]] += ext[k]
        for i in range(n):
            merged[a, i] /= n_rows
    return merged


@njit(cache=True)
def _flooding_round(llr, total, c2v_all, cols, deg, alpha, clip):
    # one flooding iteration with edge memory; updates c2v_all in place
    n_frames, n = llr.shape
    m, d_max = cols.shape
    new_total = np.zeros((n_frames, n))
    v2c = np.empty(d_max)
    c2v = np.empty(d_max)
    for a in range(n_frames):
        for j in range(m):
            for e in range(deg[j]):
                i = cols[j, e]
                v2c[e] = min(max(llr[a, i] + total[a, i] - c2v_all[a, j, e], -clip), clip)
            _check_to_var(v2c, deg[j], alpha, clip, c2v)
            for e in range(deg[j]):
                c2v_all[a, j, e] = c2v[e]
                new_total[a, cols[j, e]] += c2v[e]
    return new_total


def check_node_update(v2c: np.ndarray, mask: np.ndarray, alpha: float) -> np.ndarray:
    """Scaled min-sum check update with extrinsic exclusion.

    For each edge: ``alpha * prod(sign of the others) * min(|others|)``,
    obtained from the overall minimum, the runner-up and the sign parity.
    Padded edges return 0.
    """
    mag = np.where(mask, np.abs(v2c), np.inf)
    neg = (v2c < 0) & mask
    first = np.argmin(mag, axis=-1)[..., None]
    min1 = np.take_along_axis(mag, first, axis=-1)
    np.put_along_axis(mag, first, np.inf, axis=-1)
    min2 = mag.min(axis=-1, keepdims=True)
    pos = np.arange(v2c.shape[-1])
    out_mag = np.where(pos == first, min2, min1)
    parity = (neg.sum(axis=-1, keepdims=True) & 1).astype(bool)
    out = alpha * np.where(parity ^ neg, -out_mag, out_mag)
    return np.where(mask, out, 0.0)


@dataclass(frozen=True)
class NmsConfig:
    """Decoder settings; ``pcm`` is the (possibly redundant) matrix H_o."""

    pcm: np.ndarray
    alpha: float = 0.5
    max_iters: int = 4
    llr_clip: float = 31.75
    d_p: int | None = None
    shift_multipliers: tuple[int, ...] = (0, 1, 2)
    families: tuple[str, ...] = FAMILIES
    graph: TannerGraph = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError("alpha must lie in (0, 1]")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.llr_clip <= 0:
            raise ValueError("llr_clip must be positive")
        unknown = set(self.families) - set(FAMILIES)
        if unknown:
            raise ValueError(f"unknown automorphism families {sorted(unknown)}")
        object.__setattr__(self, "pcm", as_bits(self.pcm))
        object.__setattr__(self, "graph", TannerGraph(self.pcm))

    @property
    def n(self) -> int:
        return self.pcm.shape[1]

    @property
    def shift_period(self) -> int:
        if self.d_p is not None:
            return self.d_p
        if self.n not in DEFAULT_SHIFT_PERIOD:
            raise ValueError(f"no built-in shift period for N={self.n}; pass d_p explicitly")
        return DEFAULT_SHIFT_PERIOD[self.n]

    @property
    def dilation_rows(self) -> int:
        return len(self.families) * len(self.shift_multipliers)

    def with_alpha(self, alpha: float) -> "NmsConfig":
        return NmsConfig(self.pcm, alpha, self.max_iters, self.llr_clip, self.d_p,
                         self.shift_multipliers, self.families)


def nms_decode_batch(llr, cfg: NmsConfig) -> BatchOutcome:
    """Flooding-schedule NMS with early stopping on ``cfg.pcm``.

    Check-to-variable messages start at zero.  Each iteration forms the
    extrinsic variable-to-check messages, updates the checks, forms the
    posterior and stops frames whose hard decision satisfies every check.
    """
    llr = np.atleast_2d(np.asarray(llr, dtype=np.float64))
    g, clip = cfg.graph, cfg.llr_clip
    b = llr.shape[0]
    hard = (llr < 0).astype(np.uint8)
    post = llr.copy()
    iters = np.full(b, cfg.max_iters, dtype=np.int64)
    passed = np.zeros(b, dtype=bool)

    active = np.arange(b)
    c2v = np.zeros((b, g.m, g.d_max))
    total = np.zeros((b, g.n))
    for t in range(1, cfg.max_iters + 1):
        a_llr = llr[active]
        total = _flooding_round(a_llr, total, c2v, g.cols, g.deg, cfg.alpha, clip)
        a_post = np.clip(a_llr + total, -clip, clip)
        a_hard = (a_post < 0).astype(np.uint8)
        ok = g.syndrome_ok(a_hard)
        post[active] = a_post
        hard[active] = a_hard
        iters[active[ok]] = t
        passed[active[ok]] = True
        keep = ~ok
        active, c2v, total = active[keep], c2v[keep], total[keep]
        if active.size == 0:
            break
    return BatchOutcome(hard, iters, passed, np.zeros(b, dtype=bool), post)


def nms_decode(llr, cfg: NmsConfig) -> DecodeOutcome:
    return nms_decode_batch(np.asarray(llr)[None, :], cfg).frame(0)


@dataclass(frozen=True)
class DilationBlock:
    """Permuted copies of one frame; ``rows[d] = apply_perm(perms[d], frame)``."""

    rows: np.ndarray
    perms: tuple[Permutation, ...]


def _family_dest(cfg: NmsConfig) -> np.ndarray:
    n = cfg.n
    maps = {
        "identity": np.arange(n),
        "interleave": perm_interleave(n).dest,
        "frobenius": perm_frobenius(n).dest,
    }
    return np.array([maps[f] for f in cfg.families])


def draw_offsets(rng: np.random.Generator, cfg: NmsConfig) -> np.ndarray:
    """Random offsets ``d_o`` for every iteration and dilation row, (I_m, D)."""
    return rng.integers(0, cfg.shift_period, size=(cfg.max_iters, cfg.dilation_rows))


def dilation_dest(cfg: NmsConfig, offsets: np.ndarray) -> np.ndarray:
    """Destination maps of the dilation permutations.

    ``offsets`` has shape (..., D); the result (..., D, N) maps source bit
    ``i`` of row ``d`` to ``(family[d][i] + s_d * d_p + d_o) mod N``, rows
    ordered family-major.
    """
    offsets = np.asarray(offsets, dtype=np.int64)
    fam = _family_dest(cfg)
    n_s = len(cfg.shift_multipliers)
    fam_rows = np.repeat(fam, n_s, axis=0)                          # (D, N)
    s = np.tile(np.asarray(cfg.shift_multipliers, dtype=np.int64), len(cfg.families))
    shift = s * cfg.shift_period + offsets                          # (..., D)
    return (fam_rows + shift[..., None]) % cfg.n


def _inverse_maps(dest: np.ndarray) -> np.ndarray:
    src = np.empty_like(dest)
    np.put_along_axis(src, dest, np.broadcast_to(np.arange(dest.shape[-1]), dest.shape), axis=-1)
    return src


def dilate(frame, cfg: NmsConfig, rng: np.random.Generator | None = None,
           offsets=None) -> DilationBlock:
    """Block of ``|families| * |S_n|`` permuted copies of ``frame``.

    Offsets are drawn fresh from ``rng`` unless given explicitly (shape (D,)).
    """
    frame = np.asarray(frame, dtype=np.float64)
    if offsets is None:
        if rng is None:
            raise ValueError("dilate needs an rng or explicit offsets")
        offsets = rng.integers(0, cfg.shift_period, size=cfg.dilation_rows)
    dest = dilation_dest(cfg, offsets)
    src = _inverse_maps(dest)
    return DilationBlock(frame[src], tuple(Permutation(d) for d in dest))


def merge_extrinsic(outputs, perms: Sequence[Permutation]) -> np.ndarray:
    """Undo each row's permutation and average the rows coordinate-wise."""
    outputs = np.asarray(outputs, dtype=np.float64)
    if outputs.shape[0] != len(perms):
        raise ValueError("one permutation per output row is required")
    dest = np.array([p.dest for p in perms])
    return np.take_along_axis(outputs, dest, axis=-1).mean(axis=0)


def enhanced_nms_decode_batch(llr, cfg: NmsConfig, offsets) -> BatchOutcome:
    """Dilated NMS; ``offsets`` has shape (B, I_m, D).

    Per iteration the working frame is dilated, every copy runs one
    variable-to-check / check-to-variable pass from fresh edge state, the
    per-variable message sums are aligned back and averaged, and the
    average is added to the working frame.  Frames stop as soon as the
    hard decision satisfies all rows of ``cfg.pcm``.
    """
    y = np.atleast_2d(np.asarray(llr, dtype=np.float64)).copy()
    offsets = np.asarray(offsets, dtype=np.int64).reshape(y.shape[0], cfg.max_iters, -1)
    g, clip = cfg.graph, cfg.llr_clip
    b = y.shape[0]
    hard = (y < 0).astype(np.uint8)
    iters = np.full(b, cfg.max_iters, dtype=np.int64)
    passed = np.zeros(b, dtype=bool)
    dest_all = dilation_dest(cfg, offsets)                       # (B, I_m, D, N)

    active = np.arange(b)
    for t in range(cfg.max_iters):
        dest = dest_all[active, t]
        src = _inverse_maps(dest)
        a_y = y[active]
        merged = _enhanced_round(a_y, src, g.cols, g.deg, cfg.alpha, clip)
        a_y = np.clip(a_y + merged, -clip, clip)
        a_hard = (a_y < 0).astype(np.uint8)
        ok = g.syndrome_ok(a_hard)
        y[active] = a_y
        hard[active] = a_hard
        iters[active[ok]] = t + 1
        passed[active[ok]] = True
        active = active[~ok]
        if active.size == 0:
            break
    return BatchOutcome(hard, iters, passed, np.zeros(b, dtype=bool), y)


def enhanced_nms_decode(llr, cfg: NmsConfig, rng: np.random.Generator | None = None,
                        offsets=None) -> DecodeOutcome:
    if offsets is None:
        if rng is None:
            raise ValueError("enhanced decoding needs an rng or explicit offsets")
        offsets = draw_offsets(rng, cfg)
    return enhanced_nms_decode_batch(np.asarray(llr)[None, :], cfg, np.asarray(offsets)[None]).frame(0)


def calibrate_alpha(spec, pcm, train_snr_db: float, grid: Sequence[float] = DEFAULT_ALPHA_GRID,
                    frames: int = 2000, seed: int = 0, max_iters: int = 4,
                    batch: int = 256, return_scores: bool = False, **cfg_kw):
    """Grid search for the normalization factor of the enhanced decoder.

    Every grid value decodes the same frames with the same dilation
    offsets; the value with the fewest frame errors wins, ties going to
    the smaller value.
    """
    grid = sorted(float(a) for a in grid)
    if not grid:
        raise ValueError("alpha grid is empty")
    base = NmsConfig(pcm, alpha=grid[0], max_iters=max_iters, **cfg_kw)
    ch = ChannelConfig(train_snr_db, spec.rate, seed)
    errors = np.zeros(len(grid), dtype=np.int64)
    for start in range(0, frames, batch):
        fb = make_frames(spec, ch, start, min(batch, frames - start))
        offs = np.array([draw_offsets(r, base) for r in fb.rngs])
        llr = llr_init(fb.received, DECODER_SIGMA_SQ)
        for gi, a in enumerate(grid):
            out = enhanced_nms_decode_batch(llr, base.with_alpha(a), offs)
            errors[gi] += int((out.hard_decision != fb.codewords).any(axis=1).sum())
    best = grid[int(np.argmin(errors))]
    if return_scores:
        return best, dict(zip(grid, (errors / frames).tolist()))
    return best
