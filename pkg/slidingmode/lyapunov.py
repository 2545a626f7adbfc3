"""Lyapunov feedback design of the drives into the sliding-mode domain.

V(ψ) = ½(1 − |⟨0|ψ⟩|²) is driven down by the law
u_k = K_k f(Im[e^{i∠⟨ψ|0⟩}⟨0|σ_k|ψ⟩]) with u_k entering the Hamiltonian as
u_k I_k. The closed loop is simulated once with the control recomputed each
step and held over the step; the recorded values form an open-loop trace
that can be replayed without measuring the system.
"""

from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .bloch import ONE, PureState, SlidingModeConfig
from .dynamics import (
    IntegratorConfig,
    Trajectory,
    amplitudes_to_bloch,
    propagate_schrodinger,
    schrodinger_step,
)
from .measurement import RngStream
from .uncertainty import UncertaintyWaveform, uniform_noise

# Switch and end times of the bang-bang reference, in units of 1/u_max.
REFERENCE_SWITCH = 1.6
REFERENCE_END = 3.0

SHAPINGS = {
    "identity": lambda v: v,
    "tanh": math.tanh,
    "cubic": lambda v: v * v * v,
}


class DriveDesignError(RuntimeError):
    """The closed loop did not reach the target within ``max_time``."""


@dataclass(frozen=True)
class LyapunovConfig:
    gains: tuple[float, float, float] = (0.0, 100.0, 0.0)
    shaping: str = "identity"
    terminal_p: float | None = None
    max_time: float = 1.0

    def __post_init__(self):
        gains = tuple(float(k) for k in self.gains)
        if len(gains) != 3 or any(k < 0.0 or not math.isfinite(k) for k in gains):
            raise ValueError(f"gains must be three finite values >= 0, got {self.gains}")
        if not any(k > 0.0 for k in gains):
            raise ValueError("at least one gain must be > 0")
        if self.shaping not in SHAPINGS:
            raise ValueError(f"shaping must be one of {sorted(SHAPINGS)}, got {self.shaping!r}")
        if self.terminal_p is not None and not (0.0 < self.terminal_p < 1.0):
            raise ValueError(f"terminal_p must lie in (0, 1), got {self.terminal_p}")
        if not self.max_time > 0.0:
            raise ValueError(f"max_time must be > 0, got {self.max_time}")
        object.__setattr__(self, "gains", gains)

    @classmethod
    def sigma_y(cls, gain: float = 100.0, **kwargs) -> LyapunovConfig:
        """σ_y-only actuation."""
        return cls(gains=(0.0, gain, 0.0), **kwargs)

    def scaled(self, factor: float) -> LyapunovConfig:
        return LyapunovConfig(
            tuple(k * factor for k in self.gains), self.shaping, self.terminal_p, self.max_time
        )


@dataclass(frozen=True, eq=False)
class ControlTrace:
    """Open-loop control samples, one (u_x, u_y, u_z) per step of length ``dt``."""

    dt: float
    samples: np.ndarray

    def __post_init__(self):
        if not self.dt > 0.0:
            raise ValueError(f"trace dt must be > 0, got {self.dt}")
        samples = np.asarray(self.samples, dtype=float).reshape(-1, 3)
        object.__setattr__(self, "samples", samples)

    @classmethod
    def empty(cls, dt: float) -> ControlTrace:
        return cls(dt, np.zeros((0, 3)))

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def duration(self) -> float:
        return len(self.samples) * self.dt

    def coeffs_at(self, t: float) -> tuple[float, float, float]:
        idx = math.floor(t / self.dt + 1e-9)
        if idx < 0 or idx >= len(self.samples):
            return 0.0, 0.0, 0.0
        u = self.samples[idx]
        return float(u[0]), float(u[1]), float(u[2])

    def segments(self) -> list[tuple[float, float, tuple[float, float, float]]]:
        """Runs of identical samples as ``(start, end, (u_x, u_y, u_z))``."""
        runs = []
        start = 0
        for i in range(1, len(self.samples) + 1):
            if i == len(self.samples) or not np.array_equal(self.samples[i], self.samples[start]):
                u = tuple(float(v) for v in self.samples[start])
                runs.append((start * self.dt, i * self.dt, u))
                start = i
        return runs


class DriveDesign(NamedTuple):
    trace: ControlTrace
    trajectory: Trajectory

    @property
    def duration(self) -> float:
        return self.trace.duration

    @property
    def final_state(self) -> PureState:
        return self.trajectory.final_state


def lyapunov_value(state: PureState) -> float:
    """V = ½(1 − |a0|²), in [0, ½]."""
    return min(0.5, max(0.0, 0.5 * (1.0 - state.p_zero)))


def _feedback_signals(a0: complex, a1: complex) -> tuple[float, float, float]:
    # e^{i∠⟨ψ|0⟩} with the angle taken as 0 when ⟨ψ|0⟩ vanishes
    phase = a0.conjugate() / abs(a0) if abs(a0) > 0.0 else 1.0
    w = phase * a1
    # ⟨0|σ_x|ψ⟩ = a1, ⟨0|σ_y|ψ⟩ = −i·a1, ⟨0|σ_z|ψ⟩ = a0
    return w.imag, -w.real, (phase * a0).imag


def _law(a0: complex, a1: complex, gains, shape) -> tuple[float, float, float]:
    m = _feedback_signals(a0, a1)
    return tuple(k * shape(v) if k > 0.0 else 0.0 for k, v in zip(gains, m))


def control_value(state: PureState, cfg: LyapunovConfig) -> tuple[float, float, float]:
    """Control (u_x, u_y, u_z) prescribed by the feedback law at ``state``."""
    return _law(state.a0, state.a1, cfg.gains, SHAPINGS[cfg.shaping])


def design_drive(
    initial: PureState,
    cfg: LyapunovConfig,
    icfg: IntegratorConfig | None = None,
    smc: SlidingModeConfig | None = None,
) -> DriveDesign:
    """Simulate the closed loop from ``initial`` until |a1|² ≤ terminal_p.

    The terminal threshold defaults to ``smc.p0``. Returns the recorded
    control trace and the closed-loop trajectory; an initial state already
    inside the target gives an empty trace.
    """
    icfg = icfg or IntegratorConfig()
    terminal = cfg.terminal_p
    if terminal is None:
        if smc is None:
            raise ValueError("terminal_p is unset and no SlidingModeConfig supplies p0")
        terminal = smc.p0
    shape = SHAPINGS[cfg.shaping]
    dt = icfg.dt
    max_steps = math.ceil(cfg.max_time / dt - 1e-9)

    a0, a1 = initial.a0, initial.a1
    states = [(a0, a1)]
    samples = []
    while abs(a1) ** 2 > terminal:
        if len(samples) >= max_steps:
            raise DriveDesignError(
                f"closed loop did not reach failure probability <= {terminal} within "
                f"max_time={cfg.max_time} (still {abs(a1) ** 2:.6g}); "
                "increase the gains or max_time"
            )
        ux, uy, uz = _law(a0, a1, cfg.gains, shape)
        samples.append((ux, uy, uz))
        a0, a1 = schrodinger_step(a0, a1, ux, uy, uz + 1.0, dt)
        norm = math.sqrt(abs(a0) ** 2 + abs(a1) ** 2)
        a0, a1 = a0 / norm, a1 / norm
        states.append((a0, a1))

    n = len(samples)
    amplitudes = np.array(states, dtype=complex).reshape(-1, 2)
    controls = np.zeros((n + 1, 3))
    if n:
        controls[:n] = samples
    trajectory = Trajectory(
        t=np.arange(n + 1) * dt,
        r=amplitudes_to_bloch(amplitudes),
        controls=controls,
        noise=np.zeros((n + 1, 3)),
        states=amplitudes,
    )
    return DriveDesign(ControlTrace(dt, controls[:n]), trajectory)


def replay(
    trace: ControlTrace, initial: PureState, noise: UncertaintyWaveform | None = None
) -> Trajectory:
    """Apply a recorded trace open-loop from ``initial`` (Schrödinger integrator)."""
    return propagate_schrodinger(
        initial, trace, noise, (0.0, trace.duration), IntegratorConfig(dt=trace.dt)
    )


def time_optimal_reference(u_max: float, dt: float = 1e-4, axis: str = "y") -> ControlTrace:
    """Two-segment bang-bang drive from |1⟩ at full amplitude ``u_max``.

    Switch and end times are 1.6/u_max and 3.0/u_max. Each segment holds
    ±u_max on ``axis`` with the sign the feedback law gives at the segment's
    starting state.
    """
    if not u_max > 0.0:
        raise ValueError(f"u_max must be > 0, got {u_max}")
    channel = "xyz".index(axis)
    unit_gain = tuple(1.0 if i == channel else 0.0 for i in range(3))
    boundaries = [0, round(REFERENCE_SWITCH / u_max / dt), round(REFERENCE_END / u_max / dt)]

    samples = np.zeros((boundaries[-1], 3))
    state = ONE
    for lo, hi in zip(boundaries, boundaries[1:]):
        direction = _law(state.a0, state.a1, unit_gain, SHAPINGS["identity"])[channel]
        samples[lo:hi, channel] = math.copysign(u_max, direction)
        segment = ControlTrace(dt, samples[lo:hi])
        state = replay(segment, state).final_state
    return ControlTrace(dt, samples)


def noise_tolerance(
    trace: ControlTrace,
    axis: str,
    eps: float,
    seeds: Iterable[int],
    initial: PureState = ONE,
    resample_step: float | None = None,
) -> np.ndarray:
    """Terminal |⟨0|ψ⟩|² of ``trace`` replayed under uniform noise, one per seed."""
    results = []
    for seed in seeds:
        if trace.duration == 0.0:
            results.append(initial.p_zero)
            continue
        rng = RngStream(seed)
        noise = uniform_noise(axis, eps, trace.duration, rng.generator, resample_step or trace.dt)
        results.append(replay(trace, initial, noise).final_state.p_zero)
    return np.array(results)
