"""Unit tests for σ_z measurement and random streams."""

import math

import numpy as np
import pytest
from scipy.stats import chi2, chisquare

from slidingmode.bloch import ONE, PLUS, ZERO, PureState
from slidingmode.measurement import (
    MeasurementRecord,
    Outcome,
    RngStream,
    born_probabilities,
    measure_z,
)


class TestOutcome:
    def test_eigenvalues(self):
        assert Outcome.ZERO.eigenvalue == 1
        assert Outcome.ONE.eigenvalue == -1

    def test_record_validates_probability(self):
        with pytest.raises(ValueError):
            MeasurementRecord(0.0, Outcome.ZERO, 1.5)

    def test_record_failed(self):
        assert MeasurementRecord(0.0, Outcome.ONE, 0.2).failed
        assert not MeasurementRecord(0.0, Outcome.ZERO, 0.2).failed


class TestRngStream:
    def test_same_key_same_sequence(self):
        a, b = RngStream(7, 3), RngStream(7, 3)
        assert [a.random() for _ in range(5)] == [b.random() for _ in range(5)]

    def test_trials_are_distinct(self):
        assert RngStream(7, 0).random() != RngStream(7, 1).random()

    def test_rejects_negative_seed(self):
        with pytest.raises(ValueError):
            RngStream(-1)


class TestMeasureZ:
    def test_born_probabilities(self):
        assert born_probabilities(PLUS) == pytest.approx((0.5, 0.5))

    def test_basis_states_are_deterministic(self):
        rng = RngStream(0)
        for _ in range(100):
            assert measure_z(ZERO, rng)[1] == ZERO
            assert measure_z(ONE, rng)[1] == ONE

    def test_collapse_and_record(self):
        record, post = measure_z(PLUS, RngStream(1), t=2.5)
        assert record.t == 2.5
        assert record.pre_failure_prob == pytest.approx(0.5)
        assert post == (ONE if record.failed else ZERO)

    def test_frequencies_follow_born_rule(self):
        state = PureState.normalised(0.7**0.5, 0.3**0.5)
        rng = RngStream(42)
        n = 20000
        ones = sum(measure_z(state, rng)[0].failed for _ in range(n))
        _, p_value = chisquare([n - ones, ones], [0.7 * n, 0.3 * n])
        assert p_value > 1e-3

    def test_born_rule_across_many_states(self):
        gen = np.random.default_rng(2024)
        n = 10_000
        statistic = 0.0
        for trial, p_zero in enumerate(gen.uniform(0.05, 0.95, size=20)):
            phase = np.exp(1j * gen.uniform(0.0, 2.0 * np.pi))
            state = PureState.normalised(math.sqrt(p_zero), math.sqrt(1.0 - p_zero) * phase)
            rng = RngStream(7, trial)
            ones = sum(measure_z(state, rng)[0].failed for _ in range(n))
            expected = [state.p_zero * n, n - state.p_zero * n]
            statistic += chisquare([n - ones, ones], expected).statistic
        assert chi2.sf(statistic, df=20) > 0.01
