"""Projective σ_z measurement and seeded random streams."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .bloch import ONE, ZERO, PureState


class Outcome(str, Enum):
    ZERO = "zero"
    ONE = "one"

    @property
    def eigenvalue(self) -> int:
        return 1 if self is Outcome.ZERO else -1


@dataclass(frozen=True)
class MeasurementRecord:
    t: float
    outcome: Outcome
    pre_failure_prob: float

    def __post_init__(self):
        if not (0.0 <= self.pre_failure_prob <= 1.0):
            raise ValueError(f"pre_failure_prob must lie in [0, 1], got {self.pre_failure_prob}")

    @property
    def failed(self) -> bool:
        return self.outcome is Outcome.ONE


class RngStream:
    """Counter-based (Philox) stream keyed by ``(seed, trial)``.

    Streams for different trial indices are independent, so trials can run in
    any order or in parallel and still reproduce the same outcomes.
    """

    def __init__(self, seed: int, trial: int = 0):
        if seed < 0 or trial < 0:
            raise ValueError(f"seed and trial must be non-negative, got ({seed}, {trial})")
        self.seed = int(seed)
        self.trial = int(trial)
        self.generator = np.random.Generator(
            np.random.Philox(np.random.SeedSequence([self.seed, self.trial]))
        )

    def random(self) -> float:
        return float(self.generator.random())

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, trial={self.trial})"


def born_probabilities(state: PureState) -> tuple[float, float]:
    """(|a0|², |a1|²) renormalised to sum to one."""
    p0, p1 = state.p_zero, state.p_one
    total = p0 + p1
    return p0 / total, p1 / total


def measure_z(
    state: PureState, rng: RngStream, t: float = 0.0
) -> tuple[MeasurementRecord, PureState]:
    """Sample a σ_z outcome by the Born rule and collapse onto |0⟩ or |1⟩."""
    _, p_one = born_probabilities(state)
    p_one = min(1.0, max(0.0, p_one))
    if rng.random() < p_one:
        return MeasurementRecord(t, Outcome.ONE, p_one), ONE
    return MeasurementRecord(t, Outcome.ZERO, p_one), ZERO
