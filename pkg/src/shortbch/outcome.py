"""Decoder results shared by all decoders and the simulation harness."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np


class Stage(str, Enum):
    NMS = "NMS"
    OSD = "OSD"


class Verdict(str, Enum):
    CORRECT = "CORRECT"
    DETECTED_FAILURE = "DETECTED_FAILURE"
    UNDETECTED_ERROR = "UNDETECTED_ERROR"


@dataclass(frozen=True)
class DecodeOutcome:
    hard_decision: np.ndarray
    iterations_used: int
    syndrome_pass: bool
    stage: Stage
    posterior: np.ndarray


@dataclass
class BatchOutcome:
    """Column-wise decoder results for ``B`` frames."""

    hard_decision: np.ndarray      # (B, N) uint8
    iterations_used: np.ndarray    # (B,) int
    syndrome_pass: np.ndarray      # (B,) bool
    osd_invoked: np.ndarray        # (B,) bool
    posterior: np.ndarray          # (B, N) float

    def __len__(self) -> int:
        return self.hard_decision.shape[0]

    def frame(self, i: int) -> DecodeOutcome:
        return DecodeOutcome(
            hard_decision=self.hard_decision[i],
            iterations_used=int(self.iterations_used[i]),
            syndrome_pass=bool(self.syndrome_pass[i]),
            stage=Stage.OSD if self.osd_invoked[i] else Stage.NMS,
            posterior=self.posterior[i],
        )

    @classmethod
    def stack(cls, outcomes: list[DecodeOutcome]) -> "BatchOutcome":
        return cls(
            hard_decision=np.array([o.hard_decision for o in outcomes], dtype=np.uint8),
            iterations_used=np.array([o.iterations_used for o in outcomes], dtype=np.int64),
            syndrome_pass=np.array([o.syndrome_pass for o in outcomes], dtype=bool),
            osd_invoked=np.array([o.stage == Stage.OSD for o in outcomes], dtype=bool),
            posterior=np.array([o.posterior for o in outcomes], dtype=np.float64),
        )


def classify_outcome(decoded: DecodeOutcome, transmitted) -> Verdict:
    """Correct, detected failure (checks unsatisfied) or undetected error."""
    transmitted = np.asarray(transmitted)
    if decoded.hard_decision.shape != transmitted.shape:
        raise ValueError("decoded and transmitted words differ in length")
    if not decoded.syndrome_pass:
        return Verdict.DETECTED_FAILURE
    if np.array_equal(decoded.hard_decision, transmitted):
        return Verdict.CORRECT
    return Verdict.UNDETECTED_ERROR
