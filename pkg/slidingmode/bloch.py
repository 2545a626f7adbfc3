"""State representations, Pauli algebra and the sliding-mode functional.

The sliding mode is the ground state |0⟩ of the free Hamiltonian H₀ = I_z.
Pure states are stored as two complex amplitudes; the Bloch vector is the
real triple (tr ρσ_x, tr ρσ_y, tr ρσ_z).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

NORM_TOL = 1e-9
BLOCH_INPUT_TOL = 1e-6

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(frozen=True)
class PureState:
    """Normalised qubit state a0|0⟩ + a1|1⟩ (global phase not fixed)."""

    a0: complex
    a1: complex

    def __post_init__(self):
        norm = abs(self.a0) ** 2 + abs(self.a1) ** 2
        if not math.isfinite(norm) or abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"PureState must be normalised, got |a0|²+|a1|² = {norm!r}")
        object.__setattr__(self, "a0", complex(self.a0))
        object.__setattr__(self, "a1", complex(self.a1))

    @classmethod
    def normalised(cls, a0: complex, a1: complex) -> PureState:
        """Build a state from unnormalised amplitudes."""
        norm = math.sqrt(abs(a0) ** 2 + abs(a1) ** 2)
        if norm == 0.0:
            raise ValueError("cannot normalise the zero vector")
        return cls(a0 / norm, a1 / norm)

    @classmethod
    def from_angles(cls, theta: float, phi: float = 0.0) -> PureState:
        """cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩."""
        return cls(complex(math.cos(theta / 2)), complex(np.exp(1j * phi) * math.sin(theta / 2)))

    def as_array(self) -> np.ndarray:
        return np.array([self.a0, self.a1], dtype=complex)

    @property
    def p_zero(self) -> float:
        return abs(self.a0) ** 2

    @property
    def p_one(self) -> float:
        return abs(self.a1) ** 2


ZERO = PureState(1.0, 0.0)
ONE = PureState(0.0, 1.0)
PLUS = PureState(1 / math.sqrt(2), 1 / math.sqrt(2))


@dataclass(frozen=True)
class BlochVector:
    x: float
    y: float
    z: float

    @property
    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    @classmethod
    def from_array(cls, r) -> BlochVector:
        return cls(float(r[0]), float(r[1]), float(r[2]))


NORTH = BlochVector(0.0, 0.0, 1.0)
SOUTH = BlochVector(0.0, 0.0, -1.0)


@dataclass(frozen=True)
class HamiltonianCoeffs:
    """Coefficients of I_x, I_y, I_z (ħ = 1).

    The free Hamiltonian H₀ = I_z is added by the propagators, not here.
    """

    cx: float = 0.0
    cy: float = 0.0
    cz: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(c) for c in (self.cx, self.cy, self.cz)):
            raise ValueError(f"Hamiltonian coefficients must be finite: {self}")

    def as_array(self) -> np.ndarray:
        return np.array([self.cx, self.cy, self.cz], dtype=float)

    def with_free(self, free_z: float = 1.0) -> HamiltonianCoeffs:
        return HamiltonianCoeffs(self.cx, self.cy, self.cz + free_z)

    def matrix(self) -> np.ndarray:
        """2×2 Hamiltonian Σ c_k I_k."""
        return 0.5 * (self.cx * SIGMA_X + self.cy * SIGMA_Y + self.cz * SIGMA_Z)


@dataclass(frozen=True)
class SlidingModeConfig:
    """Allowed failure probability p0 and uncertainty bound eps."""

    p0: float
    eps: float

    def __post_init__(self):
        if not (0.0 < self.p0 < 1.0):
            raise ValueError(f"p0 must lie in (0, 1), got {self.p0}")
        if not (self.eps > 0.0 and math.isfinite(self.eps)):
            raise ValueError(f"eps must be > 0, got {self.eps}")

    @property
    def p_threshold(self) -> float:
        """p′ = ε²/(1+ε²), the largest failure probability single-axis noise reaches."""
        return self.eps**2 / (1.0 + self.eps**2)


def to_bloch(state: PureState) -> BlochVector:
    """Bloch vector (tr ρσ_x, tr ρσ_y, tr ρσ_z) of ρ = |ψ⟩⟨ψ|."""
    coherence = state.a0.conjugate() * state.a1
    return BlochVector(
        2.0 * coherence.real,
        2.0 * coherence.imag,
        abs(state.a0) ** 2 - abs(state.a1) ** 2,
    )


def from_bloch(r: BlochVector) -> PureState:
    """Pure state with a0 real and non-negative (a1 real when a0 vanishes)."""
    if abs(r.norm - 1.0) > BLOCH_INPUT_TOL:
        raise ValueError(f"Bloch vector must have unit length for a pure state, |r| = {r.norm!r}")
    transverse = math.hypot(r.x, r.y)
    if transverse == 0.0:
        return PureState(1.0, 0.0) if r.z > 0.0 else PureState(0.0, 1.0)
    # atan2 keeps the polar angle accurate next to both poles
    theta = math.atan2(transverse, r.z)
    phi = math.atan2(r.y, r.x)
    a1 = complex(np.exp(1j * phi)) * math.sin(theta / 2)
    return PureState.normalised(math.cos(theta / 2), a1)


def sliding_mode_value(state: PureState) -> float:
    """S(ψ) = 1 − |⟨0|ψ⟩|²; zero exactly on the sliding mode."""
    return min(1.0, max(0.0, 1.0 - state.p_zero))


def failure_probability(r: BlochVector) -> float:
    """Probability (1 − z)/2 that a σ_z measurement collapses to |1⟩."""
    if r.norm > 1.0 + NORM_TOL:
        raise ValueError(f"Bloch vector outside the unit ball: |r| = {r.norm!r}")
    return min(1.0, max(0.0, 0.5 * (1.0 - r.z)))


def in_domain(state: PureState, cfg: SlidingModeConfig) -> bool:
    """True iff |⟨0|ψ⟩|² ≥ 1 − p0 (boundary included)."""
    return state.p_zero >= 1.0 - cfg.p0
