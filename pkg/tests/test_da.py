"""
Tests for direct aggregation.
"""
import math

import numpy as np
import pytest
from pyaircomp.aggregate import AggregationFn, oracle
from pyaircomp.attack import AttackSpec
from pyaircomp.channel import ChannelModel, draw_gains
from pyaircomp.da import da_aggregate, da_attack_target, da_transmit_energy, nomographic_pair
from pyaircomp.model import MeasurementVector


class TestDirectAggregation:
    """Test suite for da_aggregate."""

    def test_noiseless_mean(self, rng):
        """Test the clean arithmetic and geometric means."""
        s = MeasurementVector([1, 2, 3], 4)
        assert da_aggregate(s, AggregationFn.ARITHMETIC_MEAN, AttackSpec.none(), 0.0, rng) == pytest.approx(2.0)
        s = MeasurementVector([2, 8], 8)
        assert da_aggregate(s, AggregationFn.GEOMETRIC_MEAN, AttackSpec.none(), 0.0, rng) == pytest.approx(4.0)

    def test_attack_example(self, rng):
        """Test that two attackers at 10 move the mean of [1, 2, 3] to 26/3."""
        s = MeasurementVector([1, 2, 3], 10)
        estimate = da_aggregate(s, AggregationFn.ARITHMETIC_MEAN, AttackSpec(M=2), 0.0, rng, target=10)
        assert estimate == pytest.approx(26.0 / 3.0)

    def test_error_is_linear_in_M(self, rng):
        """Test that the noiseless error is (M / K) times the target value."""
        s = MeasurementVector(rng.integers(1, 65, size=100), 64)
        truth = oracle(s, AggregationFn.ARITHMETIC_MEAN)
        for M in (0, 10, 25, 50, 100):
            estimate = da_aggregate(s, AggregationFn.ARITHMETIC_MEAN, AttackSpec(M=M), 0.0, rng, target=64)
            assert estimate - truth == pytest.approx(M / 100 * 64)

    def test_noise_variance(self):
        """Test that the estimate carries noise of variance sigma2 / (2 K^2)."""
        rng = np.random.default_rng(3)
        s = MeasurementVector([4] * 10, 8)
        estimates = [
            da_aggregate(s, AggregationFn.ARITHMETIC_MEAN, AttackSpec.none(), 1.0, rng) for _ in range(20_000)
        ]
        assert np.mean(estimates) == pytest.approx(4.0, abs=0.005)
        assert np.var(estimates) == pytest.approx(0.005, rel=0.1)

    def test_fixed_target(self, rng):
        """Test that a FixedResource attack supplies its own value."""
        from pyaircomp.attack import AttackStrategy

        s = MeasurementVector([1, 1], 4)
        attack = AttackSpec(M=2, strategy=AttackStrategy.FIXED_RESOURCE, target=4)
        assert da_aggregate(s, AggregationFn.ARITHMETIC_MEAN, attack, 0.0, rng) == pytest.approx(5.0)

    def test_unsupported(self, rng):
        """Test that DA rejects functions without a nomographic form."""
        s = MeasurementVector([1, 2], 4)
        for fn in (AggregationFn.MIN, AggregationFn.MAX, AggregationFn.MEDIAN):
            with pytest.raises(ValueError):
                da_aggregate(s, fn, AttackSpec.none(), 0.0, rng)
            with pytest.raises(ValueError):
                nomographic_pair(fn)

    def test_missing_target(self, rng):
        """Test that an attack without a target is rejected."""
        with pytest.raises(ValueError):
            da_aggregate(MeasurementVector([1], 2), AggregationFn.ARITHMETIC_MEAN, AttackSpec(M=1), 0.0, rng)


class TestAttackTarget:
    """Test suite for da_attack_target."""

    def test_top_value_for_both_means(self):
        """Test that the largest value moves either mean the most."""
        assert da_attack_target(AggregationFn.ARITHMETIC_MEAN, 64) == 64
        assert da_attack_target(AggregationFn.GEOMETRIC_MEAN, 64) == 64

    def test_shift_independent_of_data(self, rng):
        """Test that the chosen value beats the bottom value whatever the data."""
        s = MeasurementVector(np.full(10, 60), 64)
        top = da_aggregate(s, AggregationFn.ARITHMETIC_MEAN, AttackSpec(2), 0.0, rng, target=64)
        bottom = da_aggregate(s, AggregationFn.ARITHMETIC_MEAN, AttackSpec(2), 0.0, rng, target=1)

        assert abs(top - 60) > abs(bottom - 60)

    def test_unsupported(self):
        """Test that functions DA cannot compute are rejected."""
        with pytest.raises(ValueError):
            da_attack_target(AggregationFn.MEDIAN, 64)


class TestTransmitEnergy:
    """Test suite for da_transmit_energy."""

    def test_arithmetic(self):
        """Test the squared-amplitude sum of the raw values."""
        assert da_transmit_energy(MeasurementVector([1, 2, 3], 4), AggregationFn.ARITHMETIC_MEAN) == 14.0

    def test_geometric_uses_logs(self):
        """Test that the geometric mean sends log-values."""
        energy = da_transmit_energy(MeasurementVector([1, 2, 8], 8), AggregationFn.GEOMETRIC_MEAN)
        assert energy == pytest.approx(math.log(2) ** 2 + math.log(8) ** 2)

    def test_channel_inversion(self, rng):
        """Test that weak channels cost more energy."""
        s = MeasurementVector([3, 5], 8)
        gains = draw_gains(2, 8, ChannelModel.RAYLEIGH_FLAT, rng)
        expected = np.sum((s.entries / np.abs(gains.per_device())) ** 2)
        assert da_transmit_energy(s, AggregationFn.ARITHMETIC_MEAN, gains) == pytest.approx(expected)
