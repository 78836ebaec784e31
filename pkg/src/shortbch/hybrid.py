"""NMS followed by OSD on detected failures, plus complexity bookkeeping."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .nms import NmsConfig, draw_offsets, enhanced_nms_decode_batch
from .osd import OsdConfig, osd_decode
from .outcome import BatchOutcome, DecodeOutcome


@dataclass(frozen=True)
class HybridConfig:
    nms: NmsConfig
    osd: OsdConfig
    osd_enabled: bool = True

    def __post_init__(self):
        if self.nms.n != self.osd.code.n:
            raise ValueError("NMS and OSD configurations target different block lengths")


def hybrid_decode_batch(y, llr, cfg: HybridConfig, offsets) -> BatchOutcome:
    """Enhanced NMS on every frame; OSD on the original ``y``/``llr`` of the failures."""
    y = np.atleast_2d(np.asarray(y, dtype=np.float64))
    llr = np.atleast_2d(np.asarray(llr, dtype=np.float64))
    out = enhanced_nms_decode_batch(llr, cfg.nms, offsets)
    if not cfg.osd_enabled:
        return out
    for i in np.flatnonzero(~out.syndrome_pass):
        o = osd_decode(y[i], llr[i], cfg.osd)
        out.hard_decision[i] = o.hard_decision
        out.posterior[i] = o.posterior
        out.syndrome_pass[i] = True
        out.osd_invoked[i] = True
    return out


def hybrid_decode(y, llr, cfg: HybridConfig, rng: np.random.Generator | None = None,
                  offsets=None) -> DecodeOutcome:
    if offsets is None:
        if rng is None:
            raise ValueError("hybrid decoding needs an rng or explicit offsets")
        offsets = draw_offsets(rng, cfg.nms)
    return hybrid_decode_batch(np.asarray(y)[None, :], np.asarray(llr)[None, :], cfg,
                               np.asarray(offsets)[None]).frame(0)


@dataclass(frozen=True)
class ComplexityEntry:
    """Settings that drive the cost ``autos * iters * branches * rows``."""

    name: str
    autos_per_iter: int
    iters: int
    parallel_branches: int
    pcm_rows: int

    def __post_init__(self):
        for f in ("autos_per_iter", "iters", "parallel_branches", "pcm_rows"):
            if getattr(self, f) <= 0:
                raise ValueError(f"{f} must be positive")

    @property
    def cost(self) -> int:
        return self.autos_per_iter * self.iters * self.parallel_branches * self.pcm_rows


def complexity_ratio(e: ComplexityEntry, baseline: ComplexityEntry) -> float:
    return e.cost / baseline.cost


def mrrd_entry(q: int) -> ComplexityEntry:
    # (I_1, I_2, I_3) = (15, 50, q): 750 iterations per branch
    return ComplexityEntry(f"mRRD({q})", 1, 15 * 50, q, 18)


# Decoders compared on the (63,45) code.
TABLE_63_45 = (
    mrrd_entry(1),
    ComplexityEntry("MBBP", 1, 66 * 1, 3, 63),
    ComplexityEntry("BP-RNN", 1, 5, 1, 18),
    ComplexityEntry("EPCM", 1, 5, 1, 63),
    ComplexityEntry("Enhanced NMS", 9, 4, 1, 33),
)


def parse_entry(text: str, name: str = "custom") -> ComplexityEntry:
    """``"autos,iters,branches,rows"`` -> entry."""
    parts = [int(p) for p in text.replace(" ", "").split(",")]
    if len(parts) != 4:
        raise ValueError(f"expected autos,iters,branches,rows; got {text!r}")
    return ComplexityEntry(name, *parts)


def hybrid_cost(c1: float, c2: float, f1: float) -> float:
    """Expected cost ``C_1 + F_1 C_2`` when the second stage runs on failures only."""
    if not 0.0 <= f1 <= 1.0:
        raise ValueError("f1 must lie in [0, 1]")
    if c1 < 0 or c2 < 0:
        raise ValueError("costs must be non-negative")
    return c1 + f1 * c2
