"""Unit tests for the propagators."""

import math

import numpy as np
import pytest
from scipy.linalg import expm

from slidingmode.bloch import NORTH, ONE, PLUS, BlochVector, HamiltonianCoeffs, to_bloch
from slidingmode.dynamics import (
    IntegratorConfig,
    exact_step_constant,
    piecewise_curve,
    propagate_bloch,
    propagate_piecewise,
    propagate_schrodinger,
    rotate,
    time_grid,
)
from slidingmode.uncertainty import bang_bang, constant_axis, phase_flip


class TestIntegratorConfig:
    def test_rejects_non_positive_dt(self):
        with pytest.raises(ValueError, match="dt"):
            IntegratorConfig(dt=0.0)

    def test_rejects_unknown_method(self):
        with pytest.raises(ValueError, match="rk4"):
            IntegratorConfig(method="euler")


class TestTimeGrid:
    def test_ends_exactly_on_t1(self):
        grid = time_grid((0.0, 0.95), 0.1)
        assert len(grid) == 11
        assert grid[-1] == 0.95

    def test_zero_length(self):
        assert list(time_grid((0.3, 0.3), 0.1)) == [0.3]


class TestPropagators:
    def test_schrodinger_matches_matrix_exponential(self):
        coeffs = HamiltonianCoeffs(0.3, -0.7, 0.2)
        t_f = 2.0
        traj = propagate_schrodinger(PLUS, coeffs, None, (0.0, t_f), IntegratorConfig(dt=1e-3))
        expected = expm(-1j * coeffs.with_free().matrix() * t_f) @ PLUS.as_array()
        overlap = abs(np.vdot(expected, traj.states[-1]))
        assert overlap == pytest.approx(1.0, abs=1e-10)

    def test_bloch_and_schrodinger_agree(self):
        coeffs = HamiltonianCoeffs(0.0, 2.0, 0.0)
        cfg = IntegratorConfig(dt=1e-3)
        a = propagate_bloch(to_bloch(ONE), coeffs, None, (0.0, 1.0), cfg)
        b = propagate_schrodinger(ONE, coeffs, None, (0.0, 1.0), cfg)
        assert np.allclose(a.r, b.r, atol=1e-9)

    def test_norm_is_preserved(self):
        noise = bang_bang("x", 0.5, [1, -1, 1, -1], 0.5)
        traj = propagate_bloch(NORTH, lambda t: (math.sin(t), 0.0, 0.0), noise, (0.0, 2.0))
        assert np.allclose(np.linalg.norm(traj.r, axis=1), 1.0, atol=1e-12)
        assert traj.max_norm_correction < 1e-9

    def test_records_controls_and_noise(self):
        noise = constant_axis("y", 0.1)
        traj = propagate_bloch(NORTH, HamiltonianCoeffs(0.5), noise, (0.0, 0.01))
        assert traj.controls[0].tolist() == [0.5, 0.0, 0.0]
        assert traj.noise[0].tolist() == [0.0, 0.1, 0.0]
        assert traj.controls[-1].tolist() == [0.0, 0.0, 0.0]

    def test_rejects_non_unit_initial_vector(self):
        with pytest.raises(ValueError, match="unit length"):
            propagate_bloch(BlochVector(0.0, 0.0, 0.5))

    def test_final_state_requires_amplitudes(self):
        traj = propagate_bloch(NORTH, None, None, (0.0, 0.01))
        with pytest.raises(ValueError, match="no amplitudes"):
            traj.final_state

    def test_iteration_yields_samples(self):
        traj = propagate_bloch(NORTH, None, None, (0.0, 0.001), IntegratorConfig(dt=5e-4))
        samples = list(traj)
        assert len(samples) == 3
        assert samples[0].r == NORTH


class TestExactRotations:
    def test_rotation_about_z_leaves_north_fixed(self):
        r = rotate(np.array([0.0, 0.0, 1.0]), np.array([0.0, 0.0, 3.0]), 1.7)
        assert r.tolist() == pytest.approx([0.0, 0.0, 1.0])

    def test_quarter_turn(self):
        r = rotate(np.array([1.0, 0.0, 0.0]), np.array([0.0, 0.0, 1.0]), math.pi / 2)
        assert r.tolist() == pytest.approx([0.0, 1.0, 0.0], abs=1e-12)

    def test_exact_step_matches_rk4(self):
        coeffs = HamiltonianCoeffs(0.2, 0.0, 1.0)
        exact = exact_step_constant(NORTH, coeffs, 2.5)
        traj = propagate_bloch(NORTH, None, constant_axis("x", 0.2), (0.0, 2.5))
        assert exact.as_array() == pytest.approx(traj.r[-1], abs=1e-9)

    def test_piecewise_matches_rk4_on_switching_waveform(self):
        waveform = bang_bang("x", 0.3, [1, -1, -1, 1, -1], 0.4)
        traj = propagate_bloch(NORTH, None, waveform, (0.0, 2.0), IntegratorConfig(dt=1e-3))
        exact = propagate_piecewise(NORTH, waveform, 2.0)
        assert exact.as_array() == pytest.approx(traj.r[-1], abs=1e-8)

    def test_piecewise_curve_requires_sorted_times(self):
        with pytest.raises(ValueError, match="sorted"):
            piecewise_curve(NORTH, constant_axis("x", 0.1), [0.5, 0.2])


class TestConvergenceOrder:
    coeffs = HamiltonianCoeffs(3.0, -2.0, 0.5)

    def _final_error(self, schrodinger: bool, dt: float) -> float:
        cfg = IntegratorConfig(dt=dt)
        if schrodinger:
            traj = propagate_schrodinger(PLUS, self.coeffs, None, (0.0, 1.0), cfg)
        else:
            traj = propagate_bloch(to_bloch(PLUS), self.coeffs, None, (0.0, 1.0), cfg)
        exact = exact_step_constant(to_bloch(PLUS), self.coeffs.with_free(), 1.0)
        return float(np.linalg.norm(traj.r[-1] - exact.as_array()))

    @pytest.mark.parametrize("schrodinger", [False, True])
    def test_halving_dt_divides_error_by_sixteen(self, schrodinger):
        errors = [self._final_error(schrodinger, 2.0**-k) for k in (5, 6, 7)]
        ratios = [a / b for a, b in zip(errors, errors[1:])]
        assert all(12.0 < q < 20.0 for q in ratios), ratios


class TestPhaseFlipImmunity:
    @pytest.mark.parametrize("seed", range(5))
    def test_ground_state_is_stationary(self, seed):
        rng = np.random.default_rng(seed)
        waveform = phase_flip(rng.uniform(-0.5, 0.5, size=200), 0.01, 0.5)
        traj = propagate_bloch(NORTH, None, waveform, (0.0, 2.0), IntegratorConfig(dt=1e-3))
        assert np.all(traj.r[:, 2] >= 1.0 - 1e-9)
        assert propagate_piecewise(NORTH, waveform, 2.0).z >= 1.0 - 1e-9

    def test_excited_state_is_stationary(self):
        waveform = phase_flip([0.3, -0.3, 0.1], 0.5, 0.3)
        traj = propagate_schrodinger(ONE, None, waveform, (0.0, 1.5), IntegratorConfig(dt=1e-3))
        assert np.all(traj.r[:, 2] <= -1.0 + 1e-9)
