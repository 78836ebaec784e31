"""Per-code defaults used by the CLI, demos and acceptance runs."""

from __future__ import annotations

# Codes evaluated, as (m, K).
CODES = {(63, 36): (6, 36), (63, 45): (6, 45), (127, 64): (7, 64), (127, 78): (7, 78),
         (127, 99): (7, 99)}

DEFAULT_BETA = {(63, 36): 20, (63, 45): 2, (127, 64): 2, (127, 78): 2, (127, 99): 2}

# Iteration budget by block length.
DEFAULT_ITERS = {63: 4, 127: 8}

# SNR (dB) at which alpha is calibrated, by block length.
CALIBRATION_SNR = {63: 2.6, 127: 3.0}

# Grid-search results of calibrate_alpha (grid 0.05..1.00, seed 0) on the
# default-beta matrix: 2000 frames for N = 63, 1000 frames for N = 127.
CALIBRATED_ALPHA = {(63, 36): 0.8, (63, 45): 1.0, (127, 64): 0.85, (127, 78): 0.85,
                    (127, 99): 0.7}


def parse_code(text: str) -> tuple[int, int]:
    """``"63,45"`` -> ``(63, 45)``."""
    try:
        n, k = (int(p) for p in text.replace(" ", "").split(","))
    except ValueError:
        raise ValueError(f"code must be given as N,K (e.g. 63,45), got {text!r}") from None
    return n, k

