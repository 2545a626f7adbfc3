"""Unit tests for state representations and the sliding-mode functional."""

import math

import numpy as np
import pytest

from slidingmode.bloch import (
    NORTH,
    ONE,
    PLUS,
    SOUTH,
    ZERO,
    BlochVector,
    HamiltonianCoeffs,
    PureState,
    SlidingModeConfig,
    failure_probability,
    from_bloch,
    in_domain,
    sliding_mode_value,
    to_bloch,
)


class TestPureState:
    def test_rejects_unnormalised_amplitudes(self):
        with pytest.raises(ValueError, match="normalised"):
            PureState(1.0, 1.0)

    def test_normalised_rescales(self):
        state = PureState.normalised(3.0, 4.0j)
        assert state.p_zero == pytest.approx(0.36)
        assert state.p_one == pytest.approx(0.64)

    def test_normalised_rejects_zero_vector(self):
        with pytest.raises(ValueError):
            PureState.normalised(0.0, 0.0)

    def test_from_angles_matches_named_states(self):
        assert PureState.from_angles(0.0).p_zero == pytest.approx(1.0)
        assert PureState.from_angles(math.pi).p_one == pytest.approx(1.0)
        plus = PureState.from_angles(math.pi / 2)
        assert plus.a0 == pytest.approx(PLUS.a0)
        assert plus.a1 == pytest.approx(PLUS.a1)


class TestBlochMapping:
    @pytest.mark.parametrize(
        "state, expected",
        [
            (ZERO, (0.0, 0.0, 1.0)),
            (ONE, (0.0, 0.0, -1.0)),
            (PLUS, (1.0, 0.0, 0.0)),
            (PureState(1 / math.sqrt(2), 1j / math.sqrt(2)), (0.0, 1.0, 0.0)),
        ],
    )
    def test_known_states(self, state, expected):
        r = to_bloch(state)
        assert (r.x, r.y, r.z) == pytest.approx(expected, abs=1e-12)

    def test_to_bloch_has_unit_length(self):
        state = PureState.from_angles(1.1, 2.3)
        assert to_bloch(state).norm == pytest.approx(1.0, abs=1e-12)

    def test_from_bloch_recovers_state_up_to_global_phase(self):
        state = PureState(0.6 * np.exp(0.4j), 0.8 * np.exp(-1.3j))
        back = from_bloch(to_bloch(state))
        overlap = abs(np.vdot(state.as_array(), back.as_array()))
        assert overlap == pytest.approx(1.0, abs=1e-9)
        assert back.a0.imag == 0.0
        assert back.a0.real >= 0.0

    def test_from_bloch_south_pole_is_one(self):
        assert from_bloch(SOUTH) == ONE
        assert from_bloch(NORTH) == ZERO

    def test_round_trip_random_states(self):
        rng = np.random.default_rng(2024)
        amplitudes = rng.normal(size=(1000, 2)) + 1j * rng.normal(size=(1000, 2))
        for a0, a1 in amplitudes:
            r = to_bloch(PureState.normalised(a0, a1))
            back = to_bloch(from_bloch(r))
            assert back.as_array() == pytest.approx(r.as_array(), abs=1e-9)

    @pytest.mark.parametrize("p_zero", [1e-12, 1e-10, 1e-8, 1e-6, 1e-4, 1e-3])
    def test_round_trip_near_south_pole(self, p_zero):
        for phase in np.linspace(0.0, 2 * math.pi, 7):
            state = PureState.normalised(math.sqrt(p_zero), np.exp(1j * phase))
            back = from_bloch(to_bloch(state))
            fidelity = abs(np.vdot(state.as_array(), back.as_array())) ** 2
            assert 1.0 - fidelity <= 1e-12
            assert back.p_zero == pytest.approx(p_zero, rel=1e-6)

    def test_from_bloch_rejects_non_unit_vector(self):
        with pytest.raises(ValueError, match="unit length"):
            from_bloch(BlochVector(0.0, 0.0, 0.5))


class TestHamiltonianCoeffs:
    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            HamiltonianCoeffs(math.nan, 0.0, 0.0)

    def test_with_free_adds_to_z(self):
        assert HamiltonianCoeffs(0.2, 0.0, 0.5).with_free().cz == pytest.approx(1.5)

    def test_matrix_is_half_pauli_combination(self):
        m = HamiltonianCoeffs(0.0, 0.0, 2.0).matrix()
        assert np.allclose(m, np.diag([1.0, -1.0]))


class TestSlidingModeConfig:
    @pytest.mark.parametrize("p0", [0.0, 1.0, -0.1])
    def test_p0_must_be_open_interval(self, p0):
        with pytest.raises(ValueError, match="p0"):
            SlidingModeConfig(p0, 0.2)

    def test_eps_must_be_positive(self):
        with pytest.raises(ValueError, match="eps"):
            SlidingModeConfig(0.01, 0.0)

    def test_p_threshold(self):
        assert SlidingModeConfig(0.01, 0.2).p_threshold == pytest.approx(0.04 / 1.04)


class TestFunctionals:
    def test_sliding_mode_value_zero_only_on_ground_state(self):
        assert sliding_mode_value(ZERO) == 0.0
        assert sliding_mode_value(ONE) == 1.0
        assert sliding_mode_value(PLUS) == pytest.approx(0.5)

    def test_failure_probability_from_z(self):
        assert failure_probability(NORTH) == 0.0
        assert failure_probability(SOUTH) == 1.0
        assert failure_probability(BlochVector(0.6, 0.0, 0.8)) == pytest.approx(0.1)

    def test_failure_probability_rejects_outside_ball(self):
        with pytest.raises(ValueError, match="unit ball"):
            failure_probability(BlochVector(0.0, 0.0, 1.1))

    def test_in_domain_includes_boundary(self):
        cfg = SlidingModeConfig(0.36, 0.2)
        assert in_domain(PureState(0.8, 0.6), cfg)
        assert not in_domain(PureState(0.6, 0.8), cfg)
