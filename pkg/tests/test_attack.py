"""
Tests for AttackSpec and target selection.
"""
import numpy as np
import pytest
from pyaircomp.aggregate import AggregationFn, psi
from pyaircomp.attack import (
    AttackSpec,
    AttackStrategy,
    DataStats,
    attacker_count,
    choose_target,
    max_displace_targets,
)
from pyaircomp.model import MeasurementVector
from pyaircomp.tbma import corrupt_type, form_type_symbol


class TestChooseTarget:
    """Test suite for choose_target."""

    def test_far_side(self):
        """Test that MaxDisplace picks the extreme farthest from the mean."""
        assert choose_target(DataStats(1, 10, 3.0), 256) == 256
        assert choose_target(DataStats(200, 256, 250.0), 256) == 1

    def test_tie_goes_to_L(self):
        """Test that a mean at the centre picks L."""
        assert choose_target(DataStats(1, 64, 32.5), 64) == 64

    def test_always_an_extreme(self, rng):
        """Test that MaxDisplace returns 1 or L."""
        for mean in rng.uniform(1, 50, 200):
            assert choose_target(DataStats(1, 50, float(mean)), 50) in (1, 50)

    def test_fixed_resource(self):
        """Test that FixedResource returns its configured index."""
        spec = AttackSpec(M=5, strategy=AttackStrategy.FIXED_RESOURCE, target=17)
        assert choose_target(DataStats(1, 64, 32.0), 64, spec) == 17
        assert spec.resolve_target(DataStats(1, 64, 32.0), 64) == 17

    def test_vectorised(self):
        """Test the vectorised choice against the scalar one."""
        means = np.array([1.0, 10.0, 32.5, 33.0, 64.0])
        expected = [choose_target(DataStats(1, 64, m), 64) for m in means]
        np.testing.assert_array_equal(max_displace_targets(means, 64), expected)

    def test_inconsistent_stats(self):
        """Test that statistics outside [1, L] are rejected."""
        with pytest.raises(ValueError):
            choose_target(DataStats(0, 10, 5.0), 8)


class TestAttackSpec:
    """Test suite for AttackSpec."""

    def test_validation(self):
        """Test the M and target invariants."""
        with pytest.raises(ValueError):
            AttackSpec(M=-1)
        with pytest.raises(ValueError):
            AttackSpec(M=1, strategy=AttackStrategy.FIXED_RESOURCE)
        with pytest.raises(ValueError):
            AttackSpec(M=11).validate(K=10, L=8)
        with pytest.raises(ValueError):
            AttackSpec(M=1, strategy=AttackStrategy.FIXED_RESOURCE, target=9).validate(K=10, L=8)
        AttackSpec(M=10).validate(K=10, L=8)

    def test_attacker_count(self):
        """Test rounding M = ratio * K half up."""
        assert attacker_count(0.3, 1000) == 300
        assert attacker_count(0.25, 10) == 3
        assert attacker_count(0.0, 10) == 0
        with pytest.raises(ValueError):
            attacker_count(1.5, 10)

    def test_stats_from_measurements(self):
        """Test summary statistics of the legitimate data."""
        stats = DataStats.from_measurements(MeasurementVector([2, 4, 9], 10))
        assert (stats.min, stats.max, stats.mean) == (2.0, 9.0, 5.0)

    def test_displacement_grows_with_M(self, rng):
        """Test that the attack adds (M / K) target to the unnormalised mean and displaces it more with M."""
        L = 64
        s = MeasurementVector(rng.integers(20, 40, size=200), L)
        clean = form_type_symbol(s, L, 0.0, rng)
        truth = psi(clean, AggregationFn.ARITHMETIC_MEAN)
        target = choose_target(DataStats.from_measurements(s), L)
        previous = 0.0
        for M in range(10, 200, 10):
            corrupted = corrupt_type(clean, AttackSpec(M=M), target)
            unnormalised = float(np.arange(1, L + 1) @ corrupted.r)
            assert unnormalised - truth == pytest.approx(M / s.K * target)
            displacement = abs(psi(corrupted, AggregationFn.ARITHMETIC_MEAN) - truth)
            assert displacement > previous
            previous = displacement
