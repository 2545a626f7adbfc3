"""Worst-case uncertainty analysis.

For H = I_z + ε(t)I_ζ (ζ = x or y) and |ε(t)| ≤ ε, the terminal z_f is
minimised by a constant extreme waveform ε(t) ≡ ±ε as long as
t_f ≤ π/√(1+ε²). This module carries the pieces that certify it: the
closed-form constant-waveform trajectory, the backward costate, the
switching function, exhaustive and randomised searches over admissible
waveforms, and the comparison trajectories used to bound general
uncertainty by H = εI_x.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .bloch import NORTH, BlochVector, SlidingModeConfig, failure_probability
from .dynamics import (
    IntegratorConfig,
    Trajectory,
    bloch_step,
    piecewise_curve,
    propagate_bloch,
    propagate_piecewise,
    rotate,
    time_grid,
)
from .measurement import RngStream
from .periods import PeriodDesign, omega, select_period
from .uncertainty import (
    UncertaintyClass,
    UncertaintyWaveform,
    bang_bang,
    constant_axis,
    random_waveform,
)

OPTIMALITY_TOL = 1e-6
RANDOM_FAMILIES = ("bangbang", "uniform", "sinusoid")


@dataclass(frozen=True)
class CostateVector:
    l1: float
    l2: float
    l3: float

    def as_array(self) -> np.ndarray:
        return np.array([self.l1, self.l2, self.l3])


TERMINAL_COSTATE = CostateVector(0.0, 0.0, 1.0)


@dataclass(frozen=True, eq=False)
class CostateTrajectory:
    t: np.ndarray
    lam: np.ndarray

    def __len__(self) -> int:
        return len(self.t)

    def at(self, i: int) -> CostateVector:
        return CostateVector(*(float(v) for v in self.lam[i]))


@dataclass(frozen=True, eq=False)
class WorstCaseResult:
    z_f_min: float
    waveform: UncertaintyWaveform
    analytic_z_f: float
    t_f: float
    eps: float
    n_segments: int
    n_evaluated: int = 0
    random_z_min: float = math.inf

    def __post_init__(self):
        if self.z_f_min < -1.0 - 1e-12:
            raise ValueError(f"terminal z below -1: {self.z_f_min}")

    @property
    def gap(self) -> float:
        """Search minimum minus the analytic constant-waveform value (≥ 0 when optimal)."""
        return self.z_f_min - self.analytic_z_f

    @property
    def optimal(self) -> bool:
        floor = self.analytic_z_f - OPTIMALITY_TOL
        return self.z_f_min >= floor and self.random_z_min >= floor


def analytic_bangbang(eps_bar: float, t: float) -> BlochVector:
    """Bloch vector at t from |0⟩ under H = I_z + ε̄I_x with ε̄ constant."""
    if eps_bar == 0.0:
        raise ValueError("eps_bar must be non-zero")
    e2 = eps_bar * eps_bar
    w = omega(eps_bar)
    cos, sin = math.cos(w * t), math.sin(w * t)
    return BlochVector(
        -eps_bar / (1.0 + e2) * (cos - 1.0),
        -eps_bar / w * sin,
        e2 / (1.0 + e2) * cos + 1.0 / (1.0 + e2),
    )


def analytic_bangbang_tilted(eps_bar: float, theta0: float, t: float) -> BlochVector:
    """Same Hamiltonian as :func:`analytic_bangbang` from (0, −sin θ0, cos θ0)."""
    if eps_bar == 0.0:
        raise ValueError("eps_bar must be non-zero")
    e2 = eps_bar * eps_bar
    w = omega(eps_bar)
    cos, sin = math.cos(w * t), math.sin(w * t)
    c0, s0 = math.cos(theta0), math.sin(theta0)
    return BlochVector(
        -eps_bar * c0 / (1.0 + e2) * cos + s0 / w * sin + eps_bar * c0 / (1.0 + e2),
        -eps_bar * c0 / w * sin - s0 * cos,
        e2 * c0 / (1.0 + e2) * cos - eps_bar * s0 / w * sin + c0 / (1.0 + e2),
    )


def failure_prob_bangbang(eps: float, t: float) -> float:
    """p = ε²/(1+ε²)·(1 − cos ωt)/2 on its validity window [0, π/ω]."""
    w = omega(eps)
    if t < 0.0 or t > math.pi / w * (1.0 + 1e-12):
        raise ValueError(f"t={t} outside the window [0, π/√(1+ε²)] = [0, {math.pi / w:.6g}]")
    e2 = eps * eps
    return e2 / (1.0 + e2) * (1.0 - math.cos(w * t)) / 2.0


def costate_closed_form(eps_bar: float, t: float, t_f: float) -> CostateVector:
    """λ(t) for constant ε̄ with λ(t_f) = (0, 0, 1)."""
    w = omega(eps_bar)
    s = t_f - t
    e2 = eps_bar * eps_bar
    return CostateVector(
        eps_bar / (w * w) * (1.0 - math.cos(w * s)),
        eps_bar / w * math.sin(w * s),
        (e2 * math.cos(w * s) + 1.0) / (w * w),
    )


def integrate_costate(
    waveform: UncertaintyWaveform, t_f: float, cfg: IntegratorConfig | None = None
) -> CostateTrajectory:
    """Integrate λ̇ = c × λ backwards from λ(t_f) = (0, 0, 1) with RK4.

    The grid matches :func:`~slidingmode.dynamics.propagate_bloch` over
    [0, t_f], and the step ending at t_k is taken with the coefficients held
    on [t_k, t_k+1), as in the forward state equation.
    """
    cfg = cfg or IntegratorConfig()
    grid = time_grid((0.0, t_f), cfg.dt)
    lam = np.empty((len(grid), 3))
    l1, l2, l3 = TERMINAL_COSTATE.l1, TERMINAL_COSTATE.l2, TERMINAL_COSTATE.l3
    lam[-1] = l1, l2, l3
    for k in range(len(grid) - 2, -1, -1):
        ex, ey, ez = waveform.coeffs_at(float(grid[k]))
        h = float(grid[k] - grid[k + 1])
        l1, l2, l3 = bloch_step(l1, l2, l3, ex, ey, ez + 1.0, h)
        lam[k] = l1, l2, l3
    return CostateTrajectory(grid, lam)


def evaluate_switching(
    state: Trajectory, costate: CostateTrajectory, axis: str = "x"
) -> np.ndarray:
    """h(t) = ∂ℍ/∂ε of the Pontryagin function ℍ = λ·(c × r).

    For ε acting on I_x this is λ3·y − λ2·z; on I_y it is λ1·z − λ3·x.
    """
    if len(state.t) != len(costate.t) or not np.allclose(state.t, costate.t):
        raise ValueError("state and costate trajectories must share one time grid")
    x, y, z = state.r[:, 0], state.r[:, 1], state.r[:, 2]
    l1, l2, l3 = costate.lam[:, 0], costate.lam[:, 1], costate.lam[:, 2]
    if axis == "x":
        return l3 * y - l2 * z
    if axis == "y":
        return l1 * z - l3 * x
    raise ValueError(f"switching function is defined for axis x or y, got {axis!r}")


def switching_closed_form(eps_bar: float, t, t_f: float) -> np.ndarray:
    """−ε̄/ω³·[sin ωt + ε² sin ωt_f + sin ω(t_f − t)] for constant ε̄ on I_x."""
    w = omega(eps_bar)
    t = np.asarray(t, dtype=float)
    return -eps_bar / w**3 * (
        np.sin(w * t) + eps_bar**2 * math.sin(w * t_f) + np.sin(w * (t_f - t))
    )


def switching_sign_constant(h: np.ndarray, tol: float = 1e-12) -> bool:
    """True when h keeps one sign on the interior samples (no switching, no singular arc)."""
    interior = h[1:-1]
    interior = interior[np.abs(interior) > tol]
    return bool(np.all(interior > 0.0) or np.all(interior < 0.0))


def _terminal_z(waveform: UncertaintyWaveform, t_f: float) -> float:
    return propagate_piecewise(NORTH, waveform, t_f).z


def brute_force_worst(
    eps: float,
    t_f: float,
    n_segments: int,
    n_random: int = 200,
    seed: int = 0,
    axis: str = "x",
    cfg: IntegratorConfig | None = None,
) -> WorstCaseResult:
    """Search the admissible waveforms for the smallest terminal z.

    Every sign pattern of ±ε on ``n_segments`` equal segments is evaluated by
    exact rotations. ``n_random`` further waveforms (random switching
    bang-bang, uniform noise and sinusoids) are integrated with RK4.
    """
    if eps <= 0.0:
        raise ValueError(f"eps must be > 0, got {eps}")
    if not 0.0 < t_f <= math.pi / omega(eps) * (1.0 + 1e-12):
        raise ValueError(f"t_f must lie in (0, π/√(1+ε²)], got {t_f}")
    if not 1 <= n_segments <= 20:
        raise ValueError(f"n_segments must lie in [1, 20] for exhaustive search, got {n_segments}")
    cfg = cfg or IntegratorConfig(dt=1e-3)

    segment = t_f / n_segments
    best_z, best_waveform, evaluated = math.inf, None, 0
    for signs in itertools.product((1.0, -1.0), repeat=n_segments):
        waveform = bang_bang(axis, eps, signs, segment)
        z = _terminal_z(waveform, t_f)
        evaluated += 1
        if z < best_z:
            best_z, best_waveform = z, waveform

    rng = RngStream(seed).generator
    cls = UncertaintyClass.parse(axis)
    random_min = math.inf
    for i in range(n_random):
        family = RANDOM_FAMILIES[i % len(RANDOM_FAMILIES)]
        step = t_f / int(rng.integers(2, 50))
        waveform = random_waveform(family, cls, eps, t_f, rng, step)
        z = propagate_bloch(NORTH, None, waveform, (0.0, t_f), cfg).final.z
        evaluated += 1
        random_min = min(random_min, z)
        if z < best_z:
            best_z, best_waveform = z, waveform

    return WorstCaseResult(
        z_f_min=best_z,
        waveform=best_waveform,
        analytic_z_f=analytic_bangbang(eps, t_f).z,
        t_f=t_f,
        eps=eps,
        n_segments=n_segments,
        n_evaluated=evaluated,
        random_z_min=random_min,
    )


@dataclass
class ComparisonReport:
    """z^A against the comparison trajectory z^B on a time grid."""

    t: np.ndarray
    z_a: np.ndarray
    z_b: np.ndarray
    tol: float
    violations: int = 0
    details: list[str] = field(default_factory=list)

    @property
    def min_gap(self) -> float:
        return float(np.min(self.z_a - self.z_b)) if len(self.t) else math.nan

    @property
    def passed(self) -> bool:
        return self.violations == 0


def _window_grid(t_grid, window: float, default_points: int) -> np.ndarray:
    if t_grid is None:
        return np.linspace(0.0, window, default_points)
    grid = np.asarray(t_grid, dtype=float)
    if np.any(grid < 0.0) or np.any(grid > window * (1.0 + 1e-12)):
        raise ValueError(f"comparison grid must lie in [0, {window:.6g}]")
    return grid


def compare_lemma1(eps0: float, gamma0: float = 0.0, t_grid=None) -> ComparisonReport:
    """Compare z^A (H = I_z + ε₀cos γ₀ I_x + ε₀sin γ₀ I_y) with z^B = cos ε₀t.

    Both are closed forms from |0⟩; z^A does not depend on γ₀. The grid
    defaults to 1000 points on [0, π/|ε₀|].
    """
    if eps0 == 0.0:
        raise ValueError("eps0 must be non-zero")
    t = _window_grid(t_grid, math.pi / abs(eps0), 1000)
    w0 = omega(eps0)
    e2 = eps0 * eps0
    z_a = e2 / (1.0 + e2) * np.cos(w0 * t) + 1.0 / (1.0 + e2)
    z_b = np.cos(abs(eps0) * t)
    tol = 1e-12
    violations = int(np.sum(z_a < z_b - tol))
    details = [f"gamma0={gamma0:.6g}"] if violations else []
    return ComparisonReport(t, z_a, z_b, tol, violations, details)


def compare_lemma2(
    eps: float,
    waveform_samples: int = 100,
    t_grid=None,
    seed: int = 0,
    tilts=(0.5, 1.0, 2.0),
) -> ComparisonReport:
    """Compare z^A under H = I_z + ε(t)I_x, |ε(t)| ≤ ε, with z^B = cos εt.

    z^A is evaluated exactly for the constant ε, zero and ``waveform_samples``
    random bang-bang waveforms. From the tilted states (0, −sin θ0, cos θ0)
    the constant-waveform closed form is also checked against cos(θ0 + εt)
    while θ0 + εt ≤ π.
    """
    if eps <= 0.0:
        raise ValueError(f"eps must be > 0, got {eps}")
    window = math.pi / eps
    t = _window_grid(t_grid, window, 200)
    tol = OPTIMALITY_TOL
    z_b = np.cos(eps * t)

    rng = RngStream(seed).generator
    waveforms = [constant_axis("x", eps), constant_axis("x", 0.0, bound=eps)]
    for _ in range(waveform_samples):
        n = int(rng.integers(2, 40))
        waveforms.append(bang_bang("x", eps, rng.choice([-1.0, 1.0], size=n), window / n))

    z_a = np.full(len(t), np.inf)
    violations = 0
    details = []
    for waveform in waveforms:
        curve = piecewise_curve(NORTH, waveform, t)[:, 2]
        bad = int(np.sum(curve < z_b - tol))
        if bad:
            violations += bad
            details.append(f"{waveform.kind} with {waveform.n_segments} segments")
        z_a = np.minimum(z_a, curve)

    for theta0 in tilts:
        for i, ti in enumerate(t):
            if theta0 + eps * ti > math.pi:
                break
            za = analytic_bangbang_tilted(eps, theta0, float(ti)).z
            if za < math.cos(theta0 + eps * ti) - tol:
                violations += 1
                details.append(f"tilted start theta0={theta0:.6g} at t={ti:.6g}")
    return ComparisonReport(t, z_a, z_b, tol, violations, details)


@dataclass(frozen=True)
class BoundReport:
    cls: UncertaintyClass
    eps: float
    p0: float
    design: PeriodDesign
    max_failure: float
    saturating_failure: float
    n_waveforms: int
    violations: int

    @property
    def passed(self) -> bool:
        return self.violations == 0


def theorem_bound_check(
    cls: UncertaintyClass,
    eps: float,
    p0: float,
    n_waveforms: int = 500,
    seed: int = 0,
    step: float | None = None,
) -> BoundReport:
    """Evolve random admissible waveforms of ``cls`` from |0⟩ over the selected period.

    Reports the largest failure probability found and the saturating value:
    (1 − cos εT)/2 for H = εI_x without the free term (general class), and
    the constant-waveform value ε²/(1+ε²)·(1 − cos ωT)/2 (single axis).
    """
    cls = UncertaintyClass.parse(cls)
    smc = SlidingModeConfig(p0, eps)
    design = select_period(smc, cls)
    period = design.T
    rng = RngStream(seed).generator
    families = ("constant", "bangbang", "uniform", "sinusoid")

    worst, violations = 0.0, 0
    for i in range(n_waveforms):
        family = families[i % len(families)]
        sample_step = step or period / int(rng.integers(2, 60))
        waveform = random_waveform(family, cls, eps, period, rng, sample_step)
        p = failure_probability(propagate_piecewise(NORTH, waveform, period))
        worst = max(worst, p)
        if p > p0 + OPTIMALITY_TOL:
            violations += 1

    if cls.single_axis:
        saturating = failure_prob_bangbang(eps, min(period, math.pi / omega(eps)))
    else:
        r = rotate(NORTH.as_array(), np.array([eps, 0.0, 0.0]), period)
        saturating = failure_probability(BlochVector.from_array(r))
    return BoundReport(cls, eps, p0, design, worst, saturating, n_waveforms, violations)
