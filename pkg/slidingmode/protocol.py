"""Monte-Carlo simulation of the drive / measure / hold / recover protocol.

Per trial: replay the drive trace from the known initial state and measure;
then for each cycle let the system evolve for one period T under the hold
uncertainty and measure again. Every |1⟩ outcome is followed by a replay of
the recovery trace (|1⟩ → D) and one more measurement.
"""

from __future__ import annotations

import math
import time
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .bloch import NORTH, ONE, PureState, SlidingModeConfig, from_bloch, in_domain, to_bloch
from .dynamics import IntegratorConfig, piecewise_curve, propagate_piecewise
from .lyapunov import ControlTrace, DriveDesignError, LyapunovConfig, design_drive, replay
from .measurement import MeasurementRecord, RngStream, measure_z
from .periods import PeriodDesign, select_period
from .uncertainty import HOLD_FAMILIES, UncertaintyClass, UncertaintyWaveform, random_waveform

MAX_RECOVERIES = 100
Z_95 = 1.959963984540054


class Phase(str, Enum):
    DRIVE = "drive"
    HOLD = "hold"
    RECOVERY = "recovery"


@dataclass(frozen=True)
class ProtocolEvent:
    trial: int
    cycle: int
    phase: Phase
    measurement: MeasurementRecord

    @property
    def failed(self) -> bool:
        return self.measurement.failed


@dataclass(frozen=True)
class ProtocolConfig:
    smc: SlidingModeConfig
    uncertainty_class: UncertaintyClass = UncertaintyClass.X
    hold_waveform: str = "constant"
    lyapunov: LyapunovConfig = field(default_factory=LyapunovConfig)
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    n_cycles: int = 100
    n_trials: int = 100
    seed: int = 0
    initial: PureState = ONE
    noise_during_drive: bool = False
    hold_step: float = 0.01
    period: float | None = None
    drive_trace: ControlTrace | None = None
    recovery_trace: ControlTrace | None = None

    def __post_init__(self):
        cls = UncertaintyClass.parse(self.uncertainty_class)
        object.__setattr__(self, "uncertainty_class", cls)
        if self.n_cycles < 1:
            raise ValueError(f"n_cycles must be >= 1, got {self.n_cycles}")
        if self.n_trials < 1:
            raise ValueError(f"n_trials must be >= 1, got {self.n_trials}")
        if self.hold_waveform not in HOLD_FAMILIES:
            raise ValueError(
                f"hold_waveform must be one of {HOLD_FAMILIES}, got {self.hold_waveform!r}"
            )
        if self.period is not None and not self.period > 0.0:
            raise ValueError(f"measurement period must be > 0, got {self.period}")
        if not self.hold_step > 0.0:
            raise ValueError(f"hold_step must be > 0, got {self.hold_step}")
        if self.seed < 0:
            raise ValueError(f"seed must be non-negative, got {self.seed}")


@dataclass(frozen=True, eq=False)
class ProtocolPlan:
    """Designs shared by every trial: period, drive and recovery traces."""

    cfg: ProtocolConfig
    design: PeriodDesign
    period: float
    drive: ControlTrace
    recovery: ControlTrace
    drive_state: PureState
    recovery_state: PureState


@dataclass
class ProtocolStats:
    events: list[ProtocolEvent] = field(default_factory=list)
    recoveries: int = 0
    wall_time: float = 0.0
    period: float = math.nan

    @property
    def total(self) -> int:
        return len(self.events)

    @property
    def failures(self) -> int:
        return sum(1 for e in self.events if e.failed)

    def _count(self, phase: Phase, failed_only: bool = False) -> int:
        return sum(1 for e in self.events if e.phase is phase and (e.failed or not failed_only))

    @property
    def hold_measurements(self) -> int:
        return self._count(Phase.HOLD)

    @property
    def hold_failures(self) -> int:
        return self._count(Phase.HOLD, failed_only=True)

    @property
    def recovery_measurements(self) -> int:
        return self._count(Phase.RECOVERY)

    @property
    def empirical_failure_rate(self) -> float:
        return self.failures / self.total if self.total else 0.0

    @property
    def non_recovery_measurements(self) -> int:
        return self.total - self.recovery_measurements

    @property
    def non_recovery_failures(self) -> int:
        return self.failures - self._count(Phase.RECOVERY, failed_only=True)

    @property
    def rate_excluding_recovery(self) -> float:
        n = self.non_recovery_measurements
        return self.non_recovery_failures / n if n else 0.0

    @property
    def hold_failure_rate(self) -> float:
        n = self.hold_measurements
        return self.hold_failures / n if n else 0.0

    @property
    def max_hold_failure_prob(self) -> float:
        probs = [e.measurement.pre_failure_prob for e in self.events if e.phase is Phase.HOLD]
        return max(probs, default=0.0)

    @property
    def n_trials(self) -> int:
        return len({e.trial for e in self.events})

    def trial_records(self, trial: int) -> list[MeasurementRecord]:
        return [e.measurement for e in self.events if e.trial == trial]

    @staticmethod
    def ci95(rate: float, n: int) -> float:
        """Half-width of the normal-approximation binomial 95% interval."""
        return Z_95 * math.sqrt(rate * (1.0 - rate) / n) if n else 0.0

    def summary(self) -> dict[str, dict[str, float]]:
        """Failure counts per scope: every measurement, recovery excluded, hold only."""
        hold_n = self.hold_measurements
        base_n = self.non_recovery_measurements
        return {
            "all": {
                "total": self.total,
                "failures": self.failures,
                "rate": self.empirical_failure_rate,
                "ci95": self.ci95(self.empirical_failure_rate, self.total),
            },
            "non_recovery": {
                "total": base_n,
                "failures": self.non_recovery_failures,
                "rate": self.rate_excluding_recovery,
                "ci95": self.ci95(self.rate_excluding_recovery, base_n),
            },
            "hold": {
                "total": hold_n,
                "failures": self.hold_failures,
                "rate": self.hold_failure_rate,
                "ci95": self.ci95(self.hold_failure_rate, hold_n),
            },
        }

    @classmethod
    def merge(cls, parts: Sequence[ProtocolStats]) -> ProtocolStats:
        """Combine batch results; events are ordered by trial index."""
        events = sorted((e for part in parts for e in part.events), key=lambda e: e.trial)
        return cls(
            events=events,
            recoveries=sum(p.recoveries for p in parts),
            wall_time=max((p.wall_time for p in parts), default=0.0),
            period=parts[0].period if parts else math.nan,
        )


def _end_state(
    trace: ControlTrace, start: PureState, name: str, smc: SlidingModeConfig
) -> PureState:
    state = replay(trace, start).final_state if len(trace) else start
    if not in_domain(state, smc):
        raise DriveDesignError(
            f"{name} trace ends outside the sliding-mode domain: "
            f"p_one = {state.p_one:.6g} > p0 = {smc.p0}"
        )
    return state


def plan_protocol(cfg: ProtocolConfig) -> ProtocolPlan:
    """Select the period and prepare the drive (ψ0 → D) and recovery (|1⟩ → D) traces.

    Traces given in ``cfg`` are used as they are; missing ones are designed
    with the Lyapunov law. Either way the noise-free replay must end in D.
    """
    design = select_period(cfg.smc, cfg.uncertainty_class)
    period = cfg.period if cfg.period is not None else design.T
    lyapunov = cfg.lyapunov
    if lyapunov.terminal_p is None:
        lyapunov = replace(lyapunov, terminal_p=cfg.smc.p0)

    recovery = cfg.recovery_trace
    if recovery is None:
        recovery = design_drive(ONE, lyapunov, cfg.integrator, cfg.smc).trace
    if cfg.drive_trace is not None:
        drive = cfg.drive_trace
    elif cfg.initial == ONE:
        drive = recovery
    else:
        drive = design_drive(cfg.initial, lyapunov, cfg.integrator, cfg.smc).trace
    return ProtocolPlan(
        cfg=cfg,
        design=design,
        period=period,
        drive=drive,
        recovery=recovery,
        drive_state=_end_state(drive, cfg.initial, "drive", cfg.smc),
        recovery_state=_end_state(recovery, ONE, "recovery", cfg.smc),
    )


def _hold_waveform(cfg: ProtocolConfig, duration: float, rng: RngStream) -> UncertaintyWaveform:
    family, cls = cfg.hold_waveform, cfg.uncertainty_class
    return random_waveform(family, cls, cfg.smc.eps, duration, rng.generator, cfg.hold_step)


def _drive(
    plan: ProtocolPlan, trace: ControlTrace, start: PureState, rest: PureState, rng: RngStream
) -> PureState:
    cfg = plan.cfg
    if not cfg.noise_during_drive or len(trace) == 0 or cfg.hold_waveform == "none":
        return rest
    noise = _hold_waveform(cfg, trace.duration, rng)
    return replay(trace, start, noise).final_state


def _run_trial(plan: ProtocolPlan, trial: int, stats: ProtocolStats) -> None:
    cfg = plan.cfg
    rng = RngStream(cfg.seed, trial)

    def recover(state: PureState, t: float, cycle: int) -> tuple[PureState, float]:
        attempts = 0
        while state == ONE:
            if attempts >= MAX_RECOVERIES:
                raise DriveDesignError(
                    f"trial {trial}: {MAX_RECOVERIES} consecutive recoveries ended in |1⟩"
                )
            attempts += 1
            stats.recoveries += 1
            state = _drive(plan, plan.recovery, ONE, plan.recovery_state, rng)
            t += plan.recovery.duration
            record, state = measure_z(state, rng, t)
            stats.events.append(ProtocolEvent(trial, cycle, Phase.RECOVERY, record))
        return state, t

    state = _drive(plan, plan.drive, cfg.initial, plan.drive_state, rng)
    t = plan.drive.duration
    record, state = measure_z(state, rng, t)
    stats.events.append(ProtocolEvent(trial, 0, Phase.DRIVE, record))
    state, t = recover(state, t, 0)

    for cycle in range(1, cfg.n_cycles + 1):
        waveform = _hold_waveform(cfg, plan.period, rng)
        r = propagate_piecewise(to_bloch(state), waveform, plan.period)
        t += plan.period
        record, state = measure_z(from_bloch(r), rng, t)
        stats.events.append(ProtocolEvent(trial, cycle, Phase.HOLD, record))
        state, t = recover(state, t, cycle)


def run_trials(plan: ProtocolPlan, trials: Iterable[int]) -> ProtocolStats:
    """Run the given trial indices; each trial owns the stream (seed, trial)."""
    started = time.perf_counter()
    stats = ProtocolStats(period=plan.period)
    for trial in trials:
        _run_trial(plan, int(trial), stats)
    stats.wall_time = time.perf_counter() - started
    return stats


def run_protocol(cfg: ProtocolConfig, plan: ProtocolPlan | None = None) -> ProtocolStats:
    """Run all ``cfg.n_trials`` trials sequentially."""
    plan = plan or plan_protocol(cfg)
    return run_trials(plan, range(cfg.n_trials))


def hold_phase_failure_curve(
    eps: float,
    cls: UncertaintyClass,
    t_max: float,
    waveform: UncertaintyWaveform,
    n_points: int = 201,
) -> tuple[np.ndarray, np.ndarray]:
    """Failure probability p(t) = (1 − z_t)/2 along a hold from |0⟩."""
    cls = UncertaintyClass.parse(cls)
    if waveform.bound > eps + 1e-12:
        raise ValueError(f"waveform bound {waveform.bound} exceeds eps={eps}")
    if not waveform.restricted_to(cls):
        raise ValueError(f"{waveform.kind} waveform is outside uncertainty class {cls.value}")
    if t_max < 0.0:
        raise ValueError(f"t_max must be >= 0, got {t_max}")
    t = np.linspace(0.0, t_max, n_points)
    r = piecewise_curve(NORTH, waveform, t)
    return t, np.clip(0.5 * (1.0 - r[:, 2]), 0.0, 1.0)
