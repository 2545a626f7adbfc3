"""Bounded Hamiltonian uncertainty H_Δ = ε_x(t)I_x + ε_y(t)I_y + ε_z(t)I_z.

Every waveform is stored as piecewise-constant segments: ``breaks[i]`` is the
start time of segment i and ``values[i]`` its (ε_x, ε_y, ε_z). The last
segment holds for all later times. Continuous shapes such as sinusoids are
sampled zero-order-hold at a fixed step when they are built.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

BOUND_TOL = 1e-12

AXIS_VECTORS = {
    "x": np.array([1.0, 0.0, 0.0]),
    "y": np.array([0.0, 1.0, 0.0]),
    "z": np.array([0.0, 0.0, 1.0]),
}

HOLD_FAMILIES = ("none", "constant", "bangbang", "uniform", "sinusoid", "random")


class UncertaintyClass(str, Enum):
    """Selection-rule classes: both transverse axes unknown, or a single one."""

    XY = "xy"
    X = "x"
    Y = "y"

    @property
    def single_axis(self) -> bool:
        return self is not UncertaintyClass.XY

    @classmethod
    def parse(cls, value) -> UncertaintyClass:
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"uncertainty class must be one of xy, x, y; got {value!r}") from None


@dataclass(frozen=True, eq=False)
class UncertaintyWaveform:
    kind: str
    bound: float
    breaks: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        breaks = np.asarray(self.breaks, dtype=float).reshape(-1)
        values = np.asarray(self.values, dtype=float).reshape(-1, 3)
        if len(breaks) == 0 or len(breaks) != len(values):
            raise ValueError("waveform needs one break time per segment value")
        if breaks[0] != 0.0 or np.any(np.diff(breaks) <= 0.0):
            raise ValueError("waveform break times must start at 0 and increase strictly")
        if not (self.bound >= 0.0 and math.isfinite(self.bound)):
            raise ValueError(f"waveform bound must be finite and >= 0, got {self.bound}")
        object.__setattr__(self, "breaks", breaks)
        object.__setattr__(self, "values", values)
        self.check_bound()

    def check_bound(self) -> None:
        """Raise if any segment leaves the ball √(ε_x²+ε_y²+ε_z²) ≤ bound."""
        norms = np.linalg.norm(self.values, axis=1)
        worst = float(norms.max())
        if worst > self.bound + BOUND_TOL:
            raise ValueError(
                f"{self.kind} waveform violates its bound: |ε(t)| = {worst!r} > {self.bound!r}"
            )

    @property
    def n_segments(self) -> int:
        return len(self.breaks)

    def coeffs_at(self, t: float) -> tuple[float, float, float]:
        idx = int(np.searchsorted(self.breaks, t, side="right")) - 1
        v = self.values[max(idx, 0)]
        return float(v[0]), float(v[1]), float(v[2])

    def segments(self, t0: float, t1: float):
        """Yield ``(start, end, (ε_x, ε_y, ε_z))`` pieces covering [t0, t1]."""
        if t1 < t0:
            raise ValueError(f"negative interval [{t0}, {t1}]")
        idx = max(int(np.searchsorted(self.breaks, t0, side="right")) - 1, 0)
        start = t0
        while start < t1:
            end = self.breaks[idx + 1] if idx + 1 < len(self.breaks) else math.inf
            end = min(end, t1)
            if end > start:
                v = self.values[idx]
                yield start, end, (float(v[0]), float(v[1]), float(v[2]))
            start = end
            idx += 1

    def restricted_to(self, cls: UncertaintyClass) -> bool:
        """True when the waveform only perturbs the axes allowed by ``cls``."""
        if np.any(self.values[:, 2] != 0.0):
            return False
        if cls is UncertaintyClass.X:
            return bool(np.all(self.values[:, 1] == 0.0))
        if cls is UncertaintyClass.Y:
            return bool(np.all(self.values[:, 0] == 0.0))
        return True


def _axis(axis: str) -> np.ndarray:
    try:
        return AXIS_VECTORS[axis]
    except KeyError:
        raise ValueError(f"axis must be one of x, y, z; got {axis!r}") from None


def _grid(duration: float, step: float) -> np.ndarray:
    if duration <= 0.0:
        raise ValueError(f"duration must be > 0, got {duration}")
    if step <= 0.0:
        raise ValueError(f"resample step must be > 0, got {step}")
    n = max(1, math.ceil(duration / step - 1e-9))
    return np.arange(n) * step


def no_uncertainty() -> UncertaintyWaveform:
    return UncertaintyWaveform("none", 0.0, [0.0], [[0.0, 0.0, 0.0]])


def constant_xy(eps0: float, gamma0: float, bound: float | None = None) -> UncertaintyWaveform:
    """ε_x = ε₀cos γ₀, ε_y = ε₀sin γ₀ held for all time."""
    bound = abs(eps0) if bound is None else bound
    value = [eps0 * math.cos(gamma0), eps0 * math.sin(gamma0), 0.0]
    return UncertaintyWaveform("constant-xy", bound, [0.0], [value])


def constant_axis(axis: str, eps_bar: float, bound: float | None = None) -> UncertaintyWaveform:
    bound = abs(eps_bar) if bound is None else bound
    return UncertaintyWaveform(f"constant-{axis}", bound, [0.0], [eps_bar * _axis(axis)])


def bang_bang(axis: str, eps: float, signs, segment: float) -> UncertaintyWaveform:
    """Values ±ε on ``axis`` switching on a grid of equal ``segment`` lengths."""
    signs = np.sign(np.asarray(signs, dtype=float))
    if len(signs) == 0 or np.any(signs == 0.0):
        raise ValueError("bang-bang signs must be a non-empty sequence of ±1")
    if segment <= 0.0:
        raise ValueError(f"segment length must be > 0, got {segment}")
    breaks = np.arange(len(signs)) * segment
    values = np.outer(signs * eps, _axis(axis))
    return UncertaintyWaveform(f"bangbang-{axis}", abs(eps), breaks, values)


def uniform_noise(
    axis: str, eps: float, duration: float, rng: np.random.Generator, resample_step: float
) -> UncertaintyWaveform:
    """Independent uniform draws held for ``resample_step`` each.

    For ``axis="xy"`` both components are drawn from [−ε/√2, ε/√2] so the
    pair stays inside the ε-disc.
    """
    breaks = _grid(duration, resample_step)
    n = len(breaks)
    values = np.zeros((n, 3))
    if axis == "xy":
        half = eps / math.sqrt(2.0)
        values[:, :2] = rng.uniform(-half, half, size=(n, 2))
    else:
        values += np.outer(rng.uniform(-eps, eps, size=n), _axis(axis))
    return UncertaintyWaveform(f"uniform-noise-{axis}", abs(eps), breaks, values)


def phase_flip(eps_samples, step: float, bound: float) -> UncertaintyWaveform:
    """Pure ε_z(t) perturbation from samples held for ``step`` each."""
    samples = np.asarray(eps_samples, dtype=float).reshape(-1)
    breaks = np.arange(len(samples)) * step
    values = np.outer(samples, _axis("z"))
    return UncertaintyWaveform("phase-flip-z", bound, breaks, values)


def custom_sampled(times, values, bound: float) -> UncertaintyWaveform:
    return UncertaintyWaveform("custom-sampled", bound, times, values)


def sinusoid(
    axis: str,
    eps: float,
    frequency: float,
    phase: float,
    duration: float,
    step: float,
    gamma: float = 0.0,
) -> UncertaintyWaveform:
    """ε sin(ft + φ) along ``axis`` (``xy`` uses direction angle ``gamma``)."""
    breaks = _grid(duration, step)
    amplitude = eps * np.sin(frequency * breaks + phase)
    if axis == "xy":
        direction = np.array([math.cos(gamma), math.sin(gamma), 0.0])
    else:
        direction = _axis(axis)
    return UncertaintyWaveform(f"sinusoid-{axis}", abs(eps), breaks, np.outer(amplitude, direction))


def _direction(cls: UncertaintyClass, rng: np.random.Generator) -> np.ndarray:
    if cls is UncertaintyClass.XY:
        gamma = rng.uniform(0.0, 2.0 * math.pi)
        return np.array([math.cos(gamma), math.sin(gamma), 0.0])
    return _axis(cls.value)


def random_waveform(
    family: str,
    cls: UncertaintyClass,
    eps: float,
    duration: float,
    rng: np.random.Generator,
    step: float,
) -> UncertaintyWaveform:
    """Draw one admissible waveform of ``family`` inside class ``cls``.

    ``constant`` holds ±ε (the extreme value) along a drawn direction,
    ``bangbang`` switches between ±ε on a ``step`` grid, ``uniform`` resamples
    uniform noise every ``step``, ``sinusoid`` draws frequency and phase and
    ``random`` picks one of the former per call.
    """
    if family == "none":
        return no_uncertainty()
    if family == "random":
        family = str(rng.choice(["constant", "bangbang", "uniform", "sinusoid"]))

    if family == "constant":
        sign = 1.0 if rng.random() < 0.5 else -1.0
        value = sign * eps * _direction(cls, rng)
        return UncertaintyWaveform(f"constant-{cls.value}", eps, [0.0], [value])

    if family == "bangbang":
        breaks = _grid(duration, step)
        n = len(breaks)
        if cls is UncertaintyClass.XY:
            gammas = rng.uniform(0.0, 2.0 * math.pi, size=n)
            values = eps * np.column_stack([np.cos(gammas), np.sin(gammas), np.zeros(n)])
        else:
            signs = rng.choice([-1.0, 1.0], size=n)
            values = np.outer(signs * eps, _axis(cls.value))
        return UncertaintyWaveform(f"bangbang-{cls.value}", eps, breaks, values)

    if family == "uniform":
        return uniform_noise(cls.value, eps, duration, rng, step)

    if family == "sinusoid":
        frequency = rng.uniform(0.1, 10.0)
        phase = rng.uniform(0.0, 2.0 * math.pi)
        gamma = rng.uniform(0.0, 2.0 * math.pi)
        return sinusoid(cls.value, eps, frequency, phase, duration, step, gamma=gamma)

    raise ValueError(f"unknown waveform family {family!r}; expected one of {HOLD_FAMILIES}")
