"""Monte-Carlo error-rate simulation over BPSK/AWGN.

Frames are generated in fixed-size chunks from per-frame generators, so a
run stops at the same frame and yields the same tallies whatever the
number of worker processes.
"""

from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Iterable, Sequence

import numpy as np

from .bch import CodeSpec
from .channel import DECODER_SIGMA_SQ, ChannelConfig, FrameBatch, llr_init, make_frames
from .hybrid import HybridConfig, hybrid_decode_batch
from .nms import NmsConfig, draw_offsets, enhanced_nms_decode_batch, nms_decode_batch
from .osd import OsdConfig, osd_decode_batch
from .outcome import BatchOutcome

CSV_HEADER = ("code", "N", "K", "decoder", "beta", "alpha", "Im", "ebn0_db", "frames",
              "fer", "ber", "undetected_ber", "mean_iters", "osd_rate", "seed")
DECODERS = ("nms", "enhanced-nms", "osd", "hybrid")


@dataclass(frozen=True)
class StopRule:
    min_frame_errors: int = 100
    max_frames: int = 1_000_000

    def __post_init__(self):
        if self.min_frame_errors < 1 or self.max_frames < 1:
            raise ValueError("stop rule limits must be positive")


@dataclass
class SimPointReport:
    eb_n0_db: float
    frames: int
    bit_errors: int
    frame_errors: int
    undetected_frame_errors: int
    undetected_bit_errors: int
    detected_failures: int
    osd_invocations: int
    iterations_total: int
    success_frames: int
    success_iterations_total: int
    n: int
    wall_time: float = 0.0

    @property
    def fer(self) -> float:
        return self.frame_errors / self.frames if self.frames else 0.0

    @property
    def ber(self) -> float:
        return self.bit_errors / (self.frames * self.n) if self.frames else 0.0

    @property
    def undetected_ber(self) -> float:
        return self.undetected_bit_errors / (self.frames * self.n) if self.frames else 0.0

    @property
    def undetected_fer(self) -> float:
        return self.undetected_frame_errors / self.frames if self.frames else 0.0

    @property
    def mean_iterations(self) -> float:
        return self.iterations_total / self.frames if self.frames else 0.0

    @property
    def mean_iterations_success(self) -> float:
        """Mean iterations over frames the first stage decoded correctly."""
        return self.success_iterations_total / self.success_frames if self.success_frames else 0.0

    @property
    def osd_rate(self) -> float:
        return self.osd_invocations / self.frames if self.frames else 0.0

    def as_dict(self) -> dict:
        d = asdict(self)
        d.update(fer=self.fer, ber=self.ber, undetected_ber=self.undetected_ber,
                 mean_iterations=self.mean_iterations, osd_rate=self.osd_rate)
        return d


class Decoder:
    """Batch decoder bound to one code; subclasses implement ``decode``."""

    kind = ""

    def __init__(self, spec: CodeSpec, beta: int | None = None):
        self.spec = spec
        self.beta = beta

    @property
    def alpha(self) -> float | None:
        return None

    @property
    def max_iters(self) -> int | None:
        return None

    def decode(self, frames: FrameBatch, llr: np.ndarray) -> BatchOutcome:
        raise NotImplementedError


class NmsDecoder(Decoder):
    kind = "nms"

    def __init__(self, spec: CodeSpec, cfg: NmsConfig, beta: int | None = None):
        super().__init__(spec, beta)
        self.cfg = cfg

    @property
    def alpha(self):
        return self.cfg.alpha

    @property
    def max_iters(self):
        return self.cfg.max_iters

    def decode(self, frames, llr):
        return nms_decode_batch(llr, self.cfg)


class EnhancedNmsDecoder(NmsDecoder):
    kind = "enhanced-nms"

    def decode(self, frames, llr):
        offsets = np.array([draw_offsets(r, self.cfg) for r in frames.rngs])
        return enhanced_nms_decode_batch(llr, self.cfg, offsets)


class OsdDecoder(Decoder):
    kind = "osd"

    def __init__(self, spec: CodeSpec, cfg: OsdConfig):
        super().__init__(spec)
        self.cfg = cfg

    def decode(self, frames, llr):
        return osd_decode_batch(frames.received, llr, self.cfg)


class HybridDecoder(Decoder):
    kind = "hybrid"

    def __init__(self, spec: CodeSpec, cfg: HybridConfig, beta: int | None = None):
        super().__init__(spec, beta)
        self.cfg = cfg

    @property
    def alpha(self):
        return self.cfg.nms.alpha

    @property
    def max_iters(self):
        return self.cfg.nms.max_iters

    def decode(self, frames, llr):
        offsets = np.array([draw_offsets(r, self.cfg.nms) for r in frames.rngs])
        return hybrid_decode_batch(frames.received, llr, self.cfg, offsets)


def make_decoder(kind: str, spec: CodeSpec, pcm=None, alpha: float = 0.8, max_iters: int = 4,
                 osd_order: int = 2, beta: int | None = None) -> Decoder:
    if kind not in DECODERS:
        raise ValueError(f"unknown decoder {kind!r}; choose from {', '.join(DECODERS)}")
    if kind == "osd":
        return OsdDecoder(spec, OsdConfig(osd_order, spec))
    if pcm is None:
        raise ValueError(f"decoder {kind!r} needs a parity-check matrix")
    nms = NmsConfig(pcm, alpha=alpha, max_iters=max_iters)
    if kind == "nms":
        return NmsDecoder(spec, nms, beta)
    if kind == "enhanced-nms":
        return EnhancedNmsDecoder(spec, nms, beta)
    return HybridDecoder(spec, HybridConfig(nms, OsdConfig(osd_order, spec)), beta)


def _run_chunk(decoder: Decoder, ch: ChannelConfig, start: int, count: int,
               stream: int, all_zero: bool) -> dict:
    fb = make_frames(decoder.spec, ch, start, count, all_zero=all_zero, stream=stream)
    out = decoder.decode(fb, llr_init(fb.received, DECODER_SIGMA_SQ))
    bit_err = (out.hard_decision != fb.codewords).sum(axis=1)
    return {
        "bit_errors": bit_err,
        "syndrome_pass": out.syndrome_pass,
        "osd": out.osd_invoked,
        "iters": out.iterations_used,
    }


def run_point(decoder: Decoder, spec: CodeSpec, ch: ChannelConfig, stop: StopRule = StopRule(),
              chunk: int = 256, workers: int = 1, stream: int = 0,
              all_zero: bool = False) -> SimPointReport:
    """Simulate until ``stop`` triggers; counts end exactly at the stopping frame."""
    if spec.n != decoder.spec.n or spec.k != decoder.spec.k:
        raise ValueError("decoder and simulation use different codes")
    t0 = time.perf_counter()
    rep = SimPointReport(ch.eb_n0_db, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, spec.n)
    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    try:
        next_start = 0
        while rep.frames < stop.max_frames and rep.frame_errors < stop.min_frame_errors:
            jobs = []
            for _ in range(max(1, workers)):
                if next_start >= stop.max_frames:
                    break
                count = min(chunk, stop.max_frames - next_start)
                args = (decoder, ch, next_start, count, stream, all_zero)
                jobs.append(pool.submit(_run_chunk, *args) if pool else _run_chunk(*args))
                next_start += count
            for job in jobs:
                res = job.result() if pool else job
                if _absorb(rep, res, stop):
                    break
            else:
                continue
            break
    finally:
        if pool:
            pool.shutdown(cancel_futures=True)
    rep.wall_time = time.perf_counter() - t0
    return rep


def _absorb(rep: SimPointReport, res: dict, stop: StopRule) -> bool:
    """Add chunk results frame by frame; True once the stop rule fires."""
    bit_err, ok, osd, iters = res["bit_errors"], res["syndrome_pass"], res["osd"], res["iters"]
    err = bit_err > 0
    cum = np.cumsum(err) + rep.frame_errors
    hit = np.flatnonzero(cum >= stop.min_frame_errors)
    take = len(err) if hit.size == 0 else int(hit[0]) + 1
    take = min(take, stop.max_frames - rep.frames)
    sl = slice(0, take)
    e, b, p, o, it = err[sl], bit_err[sl], ok[sl], osd[sl], iters[sl]
    rep.frames += take
    rep.frame_errors += int(e.sum())
    rep.bit_errors += int(b.sum())
    rep.undetected_frame_errors += int((e & p).sum())
    rep.undetected_bit_errors += int(b[e & p].sum())
    rep.detected_failures += int((~p).sum())
    rep.osd_invocations += int(o.sum())
    rep.iterations_total += int(it.sum())
    first_stage_ok = ~e & ~o
    rep.success_frames += int(first_stage_ok.sum())
    rep.success_iterations_total += int(it[first_stage_ok].sum())
    return rep.frame_errors >= stop.min_frame_errors or rep.frames >= stop.max_frames


def sweep(decoder: Decoder, spec: CodeSpec, snrs: Sequence[float], stop: StopRule = StopRule(),
          seed: int = 0, **kw) -> list[SimPointReport]:
    """One report per SNR point; point ``i`` uses random stream ``i`` of ``seed``."""
    if len(snrs) == 0:
        raise ValueError("SNR list is empty")
    return [run_point(decoder, spec, ChannelConfig(float(s), spec.rate, seed), stop, stream=i, **kw)
            for i, s in enumerate(snrs)]


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.10g}"
    return str(x)


def csv_rows(reports: Iterable[SimPointReport], decoder: Decoder, seed: int) -> list[list[str]]:
    spec = decoder.spec
    rows = []
    for r in reports:
        rows.append([_fmt(v) for v in (
            f"{spec.n},{spec.k}", spec.n, spec.k, decoder.kind, decoder.beta, decoder.alpha,
            decoder.max_iters, float(r.eb_n0_db), r.frames, float(r.fer), float(r.ber),
            float(r.undetected_ber), float(r.mean_iterations), float(r.osd_rate), seed)])
    return rows


def write_csv(reports: Iterable[SimPointReport], decoder: Decoder, seed: int, fh=None) -> str:
    """Write the CSV to ``fh`` (if given) and return it as text."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    w.writerows(csv_rows(reports, decoder, seed))
    text = buf.getvalue()
    if fh is not None:
        fh.write(text)
    return text
