"""Short BCH codes: optimized parity-check matrices, dilated min-sum and OSD decoding."""

from __future__ import annotations

__version__ = "0.1.0"

from .bch import (CodeSpec, Permutation, apply_perm, automorphism_verify, build_code,
                  generator_encode, invert_perm, perm_cyclic, perm_frobenius, perm_interleave,
                  standard_pcm)
from .channel import ChannelConfig, llr_init, transmit_frame
from .gf2 import (WeightProfile, canonical_cyclic_form, count_length4_cycles, cyclic_shift,
                  rank, row_echelon, syndrome_ok, weight_profile)
from .hybrid import ComplexityEntry, HybridConfig, complexity_ratio, hybrid_cost, hybrid_decode
from .nms import (DilationBlock, NmsConfig, calibrate_alpha, dilate, enhanced_nms_decode,
                  merge_extrinsic, nms_decode)
from .osd import OsdConfig, SystematizedCode, osd_decode, reliability_order, systematize
from .outcome import DecodeOutcome, Stage, Verdict, classify_outcome
from .pcmopt import (AnnealConfig, CandidatePool, OptimizedPcm, anneal_layout,
                     build_optimized_pcm, cyclic_refine, pad_redundancy, rank_deficiency_report,
                     reduce_density)
from .sim import SimPointReport, StopRule, make_decoder, run_point, sweep
