"""Unit tests for the Lyapunov drive design."""

import math

import numpy as np
import pytest

from slidingmode.bloch import ONE, PLUS, ZERO, PureState, SlidingModeConfig
from slidingmode.dynamics import IntegratorConfig
from slidingmode.lyapunov import (
    ControlTrace,
    DriveDesignError,
    LyapunovConfig,
    control_value,
    design_drive,
    lyapunov_value,
    noise_tolerance,
    replay,
    time_optimal_reference,
)


@pytest.fixture(scope="module")
def nominal_drive():
    return design_drive(ONE, LyapunovConfig.sigma_y(100.0, terminal_p=0.01))


class TestLyapunovConfig:
    def test_rejects_all_zero_gains(self):
        with pytest.raises(ValueError, match="at least one gain"):
            LyapunovConfig(gains=(0.0, 0.0, 0.0))

    def test_rejects_negative_gain(self):
        with pytest.raises(ValueError):
            LyapunovConfig(gains=(0.0, -1.0, 0.0))

    def test_rejects_unknown_shaping(self):
        with pytest.raises(ValueError, match="shaping"):
            LyapunovConfig(shaping="sign")

    def test_scaled(self):
        assert LyapunovConfig.sigma_y(10.0).scaled(2.0).gains == (0.0, 20.0, 0.0)


class TestControlLaw:
    def test_lyapunov_value_range(self):
        assert lyapunov_value(ZERO) == 0.0
        assert lyapunov_value(ONE) == 0.5

    def test_excited_state_gets_full_negative_drive(self):
        assert control_value(ONE, LyapunovConfig.sigma_y(100.0)) == pytest.approx((0, -100, 0))

    def test_plus_state(self):
        ux, uy, uz = control_value(PLUS, LyapunovConfig.sigma_y(100.0))
        assert uy == pytest.approx(-100.0 / math.sqrt(2.0))
        assert ux == 0.0 and uz == 0.0

    def test_ground_state_needs_no_control(self):
        assert control_value(ZERO, LyapunovConfig(gains=(5.0, 5.0, 5.0))) == (0.0, 0.0, 0.0)

    def test_law_is_invariant_under_global_phase(self):
        cfg = LyapunovConfig(gains=(3.0, 3.0, 3.0))
        state = PureState.from_angles(2.0, 0.7)
        shifted = PureState(state.a0 * np.exp(1.1j), state.a1 * np.exp(1.1j))
        assert control_value(shifted, cfg) == pytest.approx(control_value(state, cfg))


class TestDesignDrive:
    def test_reaches_target_from_excited_state(self, nominal_drive):
        assert nominal_drive.duration == pytest.approx(0.0599, abs=1e-3)
        assert nominal_drive.final_state.p_zero == pytest.approx(0.99004, abs=1e-4)
        assert nominal_drive.final_state.p_one <= 0.01

    def test_lyapunov_function_never_increases(self, nominal_drive):
        p_one = nominal_drive.trajectory.failure_probability
        assert np.all(np.diff(p_one) <= 1e-12)

    def test_replay_reproduces_closed_loop(self, nominal_drive):
        replayed = replay(nominal_drive.trace, ONE)
        assert replayed.final_state.p_zero == pytest.approx(
            nominal_drive.final_state.p_zero, abs=1e-12
        )

    def test_empty_trace_inside_target(self):
        design = design_drive(ZERO, LyapunovConfig.sigma_y(terminal_p=0.01))
        assert len(design.trace) == 0
        assert design.duration == 0.0

    def test_terminal_defaults_to_p0(self):
        cfg = LyapunovConfig.sigma_y(100.0)
        design = design_drive(ONE, cfg, IntegratorConfig(dt=1e-3), SlidingModeConfig(0.05, 0.2))
        assert design.final_state.p_one <= 0.05

    def test_terminal_required(self):
        with pytest.raises(ValueError, match="terminal_p"):
            design_drive(ONE, LyapunovConfig.sigma_y())

    def test_fails_past_max_time(self):
        cfg = LyapunovConfig.sigma_y(1.0, terminal_p=0.01, max_time=0.01)
        with pytest.raises(DriveDesignError, match="max_time"):
            design_drive(ONE, cfg, IntegratorConfig(dt=1e-3))

    @pytest.mark.parametrize("shaping", ["identity", "tanh"])
    def test_shapings_converge_in_drive_plane(self, shaping):
        cfg = LyapunovConfig.sigma_y(100.0, shaping=shaping, terminal_p=0.01)
        design = design_drive(PureState.from_angles(2.5), cfg, IntegratorConfig(dt=1e-3))
        assert design.final_state.p_one <= 0.01

    def test_out_of_plane_start_stalls_within_default_budget(self):
        # σ_y alone leaves the y component to decay through slow free precession
        cfg = LyapunovConfig.sigma_y(100.0, terminal_p=0.01)
        with pytest.raises(DriveDesignError, match="max_time=1.0"):
            design_drive(PureState.from_angles(2.5, 0.3), cfg, IntegratorConfig(dt=1e-3))


class TestControlTrace:
    def test_coeffs_at_is_zero_outside(self):
        trace = ControlTrace(0.1, [[0.0, 1.0, 0.0], [0.0, 2.0, 0.0]])
        assert trace.coeffs_at(0.15) == (0.0, 2.0, 0.0)
        assert trace.coeffs_at(0.2) == (0.0, 0.0, 0.0)
        assert trace.coeffs_at(-0.1) == (0.0, 0.0, 0.0)

    def test_segments_merge_equal_runs(self):
        trace = ControlTrace(0.5, [[0, 1, 0], [0, 1, 0], [0, -1, 0]])
        assert trace.segments() == [(0.0, 1.0, (0.0, 1.0, 0.0)), (1.0, 1.5, (0.0, -1.0, 0.0))]


class TestTimeOptimalReference:
    def test_two_full_amplitude_segments(self):
        trace = time_optimal_reference(100.0)
        assert len(trace) == 300
        assert trace.duration == pytest.approx(0.03)
        assert np.all(trace.samples[:, 1] == -100.0)
        assert np.all(trace.samples[:, [0, 2]] == 0.0)

    def test_ends_near_ground_state(self):
        trace = time_optimal_reference(100.0)
        final = replay(trace, ONE).final_state
        assert final.p_one == pytest.approx(0.005, abs=5e-4)

    def test_rejects_non_positive_amplitude(self):
        with pytest.raises(ValueError):
            time_optimal_reference(0.0)


class TestNoiseTolerance:
    @pytest.mark.parametrize("axis, eps, band", [("x", 0.02, 0.0002), ("y", 0.02, 0.0002)])
    def test_small_noise_keeps_target(self, nominal_drive, axis, eps, band):
        values = noise_tolerance(nominal_drive.trace, axis, eps, range(5))
        assert len(values) == 5
        assert np.all(np.abs(values - 0.99) <= band + 1e-6)

    def test_reproducible(self, nominal_drive):
        a = noise_tolerance(nominal_drive.trace, "x", 0.2, [3])
        b = noise_tolerance(nominal_drive.trace, "x", 0.2, [3])
        assert a.tolist() == b.tolist()
