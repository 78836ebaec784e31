"""BPSK over AWGN and the per-frame random streams used by simulations."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bch import CodeSpec, generator_encode

# Decoder-facing noise variance; min-sum decisions do not depend on it.
DECODER_SIGMA_SQ = 2.0


def sigma_sq_for(eb_n0_db: float, rate: float) -> float:
    """Noise variance per real dimension for unit-energy BPSK."""
    return 1.0 / (2.0 * rate * 10.0 ** (eb_n0_db / 10.0))


@dataclass(frozen=True)
class ChannelConfig:
    eb_n0_db: float
    rate: float
    seed: int = 0

    @property
    def sigma_sq(self) -> float:
        return sigma_sq_for(self.eb_n0_db, self.rate)


def frame_rng(seed: int, index: int, stream: int = 0) -> np.random.Generator:
    """Independent generator for one frame, derived from the master seed."""
    return np.random.default_rng([seed & 0xFFFFFFFFFFFFFFFF, stream, index])


def transmit_frame(c, ch: ChannelConfig | float, rng: np.random.Generator) -> np.ndarray:
    """``y = (1 - 2c) + n`` with ``n ~ N(0, sigma^2)`` i.i.d.

    ``ch`` may be a :class:`ChannelConfig` or a bare noise variance.
    """
    c = np.asarray(c)
    sigma_sq = ch.sigma_sq if isinstance(ch, ChannelConfig) else float(ch)
    s = 1.0 - 2.0 * c.astype(np.float64)
    return s + np.sqrt(sigma_sq) * rng.standard_normal(c.shape)


def llr_init(y, sigma_sq: float = DECODER_SIGMA_SQ) -> np.ndarray:
    """Channel LLRs ``2 y / sigma^2``."""
    if not sigma_sq > 0:
        raise ValueError("sigma_sq must be positive")
    return 2.0 * np.asarray(y, dtype=np.float64) / sigma_sq


@dataclass
class FrameBatch:
    """Messages, codewords, observations and per-frame generators."""

    indices: np.ndarray
    messages: np.ndarray
    codewords: np.ndarray
    received: np.ndarray
    rngs: list


def make_frames(spec: CodeSpec, ch: ChannelConfig, start: int, count: int,
                all_zero: bool = False, stream: int = 0) -> FrameBatch:
    """Frames ``start .. start + count - 1`` of the stream for ``ch.seed``.

    Each frame draws its message, then its noise, from its own generator;
    the generator is handed on so decoders can draw further (e.g. dilation
    offsets) without coupling frames.
    """
    rngs, msgs, noise = [], [], []
    for idx in range(start, start + count):
        rng = frame_rng(ch.seed, idx, stream)
        msg = rng.integers(0, 2, size=spec.k, dtype=np.uint8)
        if all_zero:
            msg[:] = 0
        msgs.append(msg)
        noise.append(rng.standard_normal(spec.n))
        rngs.append(rng)
    msgs = np.array(msgs, dtype=np.uint8).reshape(count, spec.k)
    words = generator_encode(spec, msgs)
    y = (1.0 - 2.0 * words) + np.sqrt(ch.sigma_sq) * np.array(noise).reshape(count, spec.n)
    return FrameBatch(np.arange(start, start + count), msgs, words, y, rngs)
