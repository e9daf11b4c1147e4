"""
Byzantine attack description and target-resource selection.

Attackers are M devices in addition to the K legitimate ones; they are
coordinated and all transmit on the same resource.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import numpy.typing as npt

from .model import MeasurementVector


class AttackStrategy(enum.Enum):
    """How the attacked resource is chosen."""

    FIXED_RESOURCE = "FixedResource"
    MAX_DISPLACE = "MaxDisplace"


@dataclass(frozen=True)
class DataStats:
    """Summary statistics of the legitimate data known to the attackers."""

    min: float
    max: float
    mean: float

    @classmethod
    def from_measurements(cls, s: MeasurementVector) -> "DataStats":
        entries = s.entries
        return cls(float(entries.min()), float(entries.max()), float(entries.mean()))


@dataclass(frozen=True)
class AttackSpec:
    """
    Attacker population and targeting strategy.

    Attributes:
        M (int): Number of attackers, >= 0
        strategy (AttackStrategy): FixedResource or MaxDisplace
        target (int, optional): Resource attacked under FixedResource
    """

    M: int = 0
    strategy: AttackStrategy = AttackStrategy.MAX_DISPLACE
    target: Optional[int] = None

    def __post_init__(self):
        if self.M < 0:
            raise ValueError(f"Attacker count must be >= 0, got {self.M}")
        if self.strategy is AttackStrategy.FIXED_RESOURCE and self.target is None:
            raise ValueError("FixedResource attacks need a target resource")

    @classmethod
    def none(cls) -> "AttackSpec":
        return cls(M=0)

    def validate(self, K: int, L: int) -> None:
        """
        Check the attack against a system of K devices and L resources.

        Raises:
            ValueError: If M > K or the fixed target lies outside [1, L]
        """
        if self.M > K:
            raise ValueError(f"At most K={K} attackers are supported, got M={self.M}")
        if self.target is not None and not 1 <= self.target <= L:
            raise ValueError(f"Target resource {self.target} outside [1, {L}]")

    def resolve_target(self, stats: DataStats, L: int) -> int:
        """Return the attacked resource for the given legitimate data."""
        return choose_target(stats, L, self)


def attacker_count(ratio: float, K: int) -> int:
    """
    Number of attackers for an attacker ratio M/K, rounded half up.

    Args:
        ratio (float): Attacker ratio in [0, 1]
        K (int): Legitimate device count

    Returns:
        int: M
    """
    if not 0.0 <= ratio <= 1.0:
        raise ValueError(f"Attacker ratio must lie in [0, 1], got {ratio}")
    return int(math.floor(ratio * K + 0.5))


def choose_target(stats: DataStats, L: int, spec: Optional[AttackSpec] = None) -> int:
    """
    Choose the attacked resource.

    MaxDisplace picks the extreme resource farthest from the legitimate mean,
    breaking ties toward L; FixedResource returns the configured resource.

    Args:
        stats (DataStats): Legitimate data statistics
        L (int): Number of resources
        spec (AttackSpec, optional): Attack; MaxDisplace when omitted

    Returns:
        int: Resource index in [1, L]
    """
    if spec is not None and spec.strategy is AttackStrategy.FIXED_RESOURCE:
        if not 1 <= spec.target <= L:
            raise ValueError(f"Target resource {spec.target} outside [1, {L}]")
        return int(spec.target)
    if not 1 <= stats.min <= stats.max <= L:
        raise ValueError(f"Data statistics {stats} inconsistent with L={L}")
    return L if (L - stats.mean) >= (stats.mean - 1) else 1


def max_displace_targets(mean_bins: npt.ArrayLike, L: int) -> np.ndarray:
    """Vectorised MaxDisplace choice for many parameters at once."""
    mean_bins = np.asarray(mean_bins, dtype=float)
    return np.where((L - mean_bins) >= (mean_bins - 1), L, 1).astype(np.int64)
