"""Time evolution under H = I_z + H_u + H_Δ.

Coefficients (c_x, c_y, c_z) of the total Hamiltonian Σ c_k I_k are held
constant over every integration step (zero-order hold on controls and
noise), so a step is a pure rotation of the Bloch vector about c by |c|·dt.
The Bloch vector obeys ṙ = c × r; the amplitudes obey i|ψ̇⟩ = ½(c·σ)|ψ⟩.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Iterator
from dataclasses import dataclass

import numpy as np

from .bloch import BlochVector, HamiltonianCoeffs, PureState
from .uncertainty import UncertaintyWaveform

UNIT_TOL = 1e-6


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float = 1e-4
    method: str = "rk4"

    def __post_init__(self):
        if not (self.dt > 0.0 and math.isfinite(self.dt)):
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if self.method != "rk4":
            raise ValueError(f"only the fixed-step 'rk4' method is available, got {self.method!r}")


@dataclass(frozen=True)
class TrajectorySample:
    t: float
    r: BlochVector
    controls: HamiltonianCoeffs


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled evolution at every integrator step, starting time included.

    ``controls`` and ``noise`` hold the coefficients applied on the step that
    starts at each sample (zero on the final sample). ``states`` carries the
    amplitudes when the trajectory came from the Schrödinger integrator.
    """

    t: np.ndarray
    r: np.ndarray
    controls: np.ndarray
    noise: np.ndarray
    states: np.ndarray | None = None
    max_norm_correction: float = 0.0

    def __len__(self) -> int:
        return len(self.t)

    def __iter__(self) -> Iterator[TrajectorySample]:
        for i in range(len(self.t)):
            yield self.sample(i)

    def sample(self, i: int) -> TrajectorySample:
        c = self.controls[i]
        return TrajectorySample(
            float(self.t[i]),
            BlochVector.from_array(self.r[i]),
            HamiltonianCoeffs(float(c[0]), float(c[1]), float(c[2])),
        )

    @property
    def final(self) -> BlochVector:
        return BlochVector.from_array(self.r[-1])

    @property
    def final_state(self) -> PureState:
        if self.states is None:
            raise ValueError("trajectory was integrated on the Bloch sphere; no amplitudes stored")
        a0, a1 = self.states[-1]
        return PureState.normalised(complex(a0), complex(a1))

    @property
    def failure_probability(self) -> np.ndarray:
        return np.clip(0.5 * (1.0 - self.r[:, 2]), 0.0, 1.0)


Controls = HamiltonianCoeffs | Callable[[float], tuple[float, float, float]] | None


def _control_source(controls) -> Callable[[float], tuple[float, float, float]]:
    """Normalise a constant, a ``coeffs_at`` provider or a callable to t -> triple."""
    if controls is None:
        return lambda t: (0.0, 0.0, 0.0)
    if isinstance(controls, HamiltonianCoeffs):
        value = (controls.cx, controls.cy, controls.cz)
        return lambda t: value
    if hasattr(controls, "coeffs_at"):
        return controls.coeffs_at
    if callable(controls):

        def _call(t):
            c = controls(t)
            if isinstance(c, HamiltonianCoeffs):
                return c.cx, c.cy, c.cz
            return float(c[0]), float(c[1]), float(c[2])

        return _call
    raise TypeError(f"unsupported control specification: {type(controls).__name__}")


def time_grid(t_span: tuple[float, float], dt: float) -> np.ndarray:
    t0, t1 = float(t_span[0]), float(t_span[1])
    length = t1 - t0
    if length < 0.0:
        raise ValueError(f"t_span has negative length: {t_span}")
    n = math.ceil(length / dt - 1e-9) if length > 0.0 else 0
    grid = t0 + np.arange(n + 1) * dt
    grid[-1] = t1 if n else t0
    return grid


def bloch_step(x, y, z, cx, cy, cz, h):
    """One RK4 step of ṙ = c × r with c held constant."""

    def f(px, py, pz):
        return cy * pz - cz * py, cz * px - cx * pz, cx * py - cy * px

    k1 = f(x, y, z)
    k2 = f(x + 0.5 * h * k1[0], y + 0.5 * h * k1[1], z + 0.5 * h * k1[2])
    k3 = f(x + 0.5 * h * k2[0], y + 0.5 * h * k2[1], z + 0.5 * h * k2[2])
    k4 = f(x + h * k3[0], y + h * k3[1], z + h * k3[2])
    w = h / 6.0
    return (
        x + w * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
        y + w * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]),
        z + w * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2]),
    )


def schrodinger_step(a0, a1, cx, cy, cz, h):
    """One RK4 step of i|ψ̇⟩ = ½(c·σ)|ψ⟩ with c held constant."""
    minus = cx - 1j * cy
    plus = cx + 1j * cy

    def f(p0, p1):
        return -0.5j * (cz * p0 + minus * p1), -0.5j * (plus * p0 - cz * p1)

    k1 = f(a0, a1)
    k2 = f(a0 + 0.5 * h * k1[0], a1 + 0.5 * h * k1[1])
    k3 = f(a0 + 0.5 * h * k2[0], a1 + 0.5 * h * k2[1])
    k4 = f(a0 + h * k3[0], a1 + h * k3[1])
    w = h / 6.0
    return (
        a0 + w * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
        a1 + w * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]),
    )


def propagate_bloch(
    r0: BlochVector,
    controls: Controls = None,
    noise: UncertaintyWaveform | None = None,
    t_span: tuple[float, float] = (0.0, 1.0),
    cfg: IntegratorConfig | None = None,
    free_z: float = 1.0,
) -> Trajectory:
    """Integrate ṙ = c × r with RK4, renormalising r after every step."""
    cfg = cfg or IntegratorConfig()
    if abs(r0.norm - 1.0) > UNIT_TOL:
        raise ValueError(f"initial Bloch vector must have unit length, |r0| = {r0.norm!r}")
    if noise is not None:
        noise.check_bound()
    control_at = _control_source(controls)
    noise_at = noise.coeffs_at if noise is not None else (lambda t: (0.0, 0.0, 0.0))

    grid = time_grid(t_span, cfg.dt)
    n = len(grid)
    r = np.empty((n, 3))
    u = np.zeros((n, 3))
    e = np.zeros((n, 3))
    x, y, z = r0.x / r0.norm, r0.y / r0.norm, r0.z / r0.norm
    r[0] = x, y, z
    worst = 0.0
    for k in range(n - 1):
        t = float(grid[k])
        u[k] = ux, uy, uz = control_at(t)
        e[k] = ex, ey, ez = noise_at(t)
        h = float(grid[k + 1]) - t
        x, y, z = bloch_step(x, y, z, ux + ex, uy + ey, uz + ez + free_z, h)
        norm = math.sqrt(x * x + y * y + z * z)
        worst = max(worst, abs(norm - 1.0))
        x, y, z = x / norm, y / norm, z / norm
        r[k + 1] = x, y, z
    return Trajectory(grid, r, u, e, None, worst)


def propagate_schrodinger(
    s0: PureState,
    controls: Controls = None,
    noise: UncertaintyWaveform | None = None,
    t_span: tuple[float, float] = (0.0, 1.0),
    cfg: IntegratorConfig | None = None,
    free_z: float = 1.0,
) -> Trajectory:
    """Integrate the Schrödinger equation with RK4, renormalising |ψ⟩ each step."""
    cfg = cfg or IntegratorConfig()
    if noise is not None:
        noise.check_bound()
    control_at = _control_source(controls)
    noise_at = noise.coeffs_at if noise is not None else (lambda t: (0.0, 0.0, 0.0))

    grid = time_grid(t_span, cfg.dt)
    n = len(grid)
    states = np.empty((n, 2), dtype=complex)
    u = np.zeros((n, 3))
    e = np.zeros((n, 3))
    a0, a1 = s0.a0, s0.a1
    states[0] = a0, a1
    worst = 0.0
    for k in range(n - 1):
        t = float(grid[k])
        u[k] = ux, uy, uz = control_at(t)
        e[k] = ex, ey, ez = noise_at(t)
        h = float(grid[k + 1]) - t
        a0, a1 = schrodinger_step(a0, a1, ux + ex, uy + ey, uz + ez + free_z, h)
        norm = math.sqrt(abs(a0) ** 2 + abs(a1) ** 2)
        worst = max(worst, abs(norm - 1.0))
        a0, a1 = a0 / norm, a1 / norm
        states[k + 1] = a0, a1
    return Trajectory(grid, amplitudes_to_bloch(states), u, e, states, worst)


def amplitudes_to_bloch(states: np.ndarray) -> np.ndarray:
    """Vectorised ``bloch.to_bloch`` over an (n, 2) array of amplitudes."""
    coherence = np.conj(states[:, 0]) * states[:, 1]
    return np.column_stack(
        [
            2.0 * coherence.real,
            2.0 * coherence.imag,
            np.abs(states[:, 0]) ** 2 - np.abs(states[:, 1]) ** 2,
        ]
    )


def rotate(r: np.ndarray, c: np.ndarray, t: float) -> np.ndarray:
    """Rodrigues rotation of r about c/|c| by the angle |c|·t."""
    magnitude = float(np.linalg.norm(c))
    if magnitude == 0.0:
        return np.array(r, dtype=float)
    k = c / magnitude
    angle = magnitude * t
    cos, sin = math.cos(angle), math.sin(angle)
    return r * cos + np.cross(k, r) * sin + k * float(np.dot(k, r)) * (1.0 - cos)


def exact_step_constant(r0: BlochVector, coeffs: HamiltonianCoeffs, t: float) -> BlochVector:
    """Exact evolution of r0 for time t under the constant total coefficients ``coeffs``.

    ``coeffs`` is the full field, so the free I_z must already be included.
    """
    return BlochVector.from_array(rotate(r0.as_array(), coeffs.as_array(), t))


def piecewise_curve(
    r0: BlochVector, waveform: UncertaintyWaveform, times, free_z: float = 1.0
) -> np.ndarray:
    """Exact Bloch vectors at sorted ``times`` under H = free_z·I_z + H_Δ."""
    times = np.asarray(times, dtype=float)
    if len(times) and (times[0] < 0.0 or np.any(np.diff(times) < 0.0)):
        raise ValueError("sample times must be non-negative and sorted")
    out = np.empty((len(times), 3))
    r = r0.as_array()
    now = 0.0
    for i, target in enumerate(times):
        for start, end, (ex, ey, ez) in waveform.segments(now, float(target)):
            r = rotate(r, np.array([ex, ey, ez + free_z]), end - start)
        now = float(target)
        out[i] = r
    return out


def propagate_piecewise(
    r0: BlochVector, waveform: UncertaintyWaveform, duration: float, free_z: float = 1.0
) -> BlochVector:
    """Compose exact rotations over the segments of a piecewise-constant waveform."""
    if duration < 0.0:
        raise ValueError(f"duration must be >= 0, got {duration}")
    return BlochVector.from_array(piecewise_curve(r0, waveform, [duration], free_z)[0])
