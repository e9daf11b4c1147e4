"""
Function estimation from types, ground-truth oracles and the NMSE metric.

Estimators work on the unit-mass reading of a type: negative entries are
clamped to zero and every mean is divided by the retained mass, so a type
and any positive multiple of it give the same estimate.
"""
from __future__ import annotations

import enum
from typing import Dict, Iterable

import numpy as np
import numpy.typing as npt

from .errors import EstimationError
from .model import MeasurementVector
from .robust import _as_vector, median_from_type


class AggregationFn(enum.Enum):
    """Functions the receiver can compute."""

    ARITHMETIC_MEAN = "ArithmeticMean"
    GEOMETRIC_MEAN = "GeometricMean"
    MIN = "Min"
    MAX = "Max"
    MEDIAN = "Median"

    @property
    def is_mean(self) -> bool:
        return self in (AggregationFn.ARITHMETIC_MEAN, AggregationFn.GEOMETRIC_MEAN)


def _retained(values):
    positive = np.clip(values, 0.0, None)
    mass = positive.sum()
    if not mass > 0:
        raise EstimationError("Type has no retained mass")
    return positive, mass


def _detect(values, noise_floor, fn):
    active = np.flatnonzero(values > noise_floor)
    if active.size == 0:
        raise EstimationError(f"No resource above the noise floor {noise_floor:g} for {fn.value}")
    return float(active[0] + 1) if fn is AggregationFn.MIN else float(active[-1] + 1)


def psi(r: npt.ArrayLike, fn: AggregationFn, noise_floor: float = 0.0) -> float:
    """
    Estimate a function of the transmitted data from a type.

    Args:
        r (NoisyType, CorrectedType or array_like): Type over resources 1..L
        fn (AggregationFn): Function to estimate
        noise_floor (float): Detection threshold for Min and Max

    Returns:
        float: The estimate

    Raises:
        EstimationError: If the type has no retained mass or nothing is detected
    """
    values = _as_vector(r)
    levels = np.arange(1, values.size + 1, dtype=float)
    if fn is AggregationFn.ARITHMETIC_MEAN:
        positive, mass = _retained(values)
        return float(levels @ positive / mass)
    if fn is AggregationFn.GEOMETRIC_MEAN:
        positive, mass = _retained(values)
        return float(np.exp(np.log(levels) @ positive / mass))
    if fn in (AggregationFn.MIN, AggregationFn.MAX):
        return _detect(values, noise_floor, fn)
    return float(median_from_type(values))


def psi_all(r: npt.ArrayLike, fns: Iterable[AggregationFn], noise_floor: float = 0.0) -> Dict[AggregationFn, float]:
    """Estimate several functions from the same type."""
    return {fn: psi(r, fn, noise_floor) for fn in fns}


def oracle(s: MeasurementVector, fn: AggregationFn) -> float:
    """
    Exact value of a function over the legitimate measurements.

    The median is the lower median, the element of rank (K-1)//2.

    Args:
        s (MeasurementVector): Legitimate measurements
        fn (AggregationFn): Function

    Returns:
        float: f(s_1, ..., s_K)
    """
    x = s.entries.astype(float)
    if fn is AggregationFn.ARITHMETIC_MEAN:
        return float(x.mean())
    if fn is AggregationFn.GEOMETRIC_MEAN:
        return float(np.exp(np.log(x).mean()))
    if fn is AggregationFn.MIN:
        return float(x.min())
    if fn is AggregationFn.MAX:
        return float(x.max())
    return float(np.sort(x)[(x.size - 1) // 2])


def nmse(truth: float, estimate: float) -> float:
    """
    Normalised squared error (truth - estimate)^2 / truth^2.

    Raises:
        EstimationError: If truth is zero
    """
    if truth == 0:
        raise EstimationError("NMSE is undefined for a zero ground truth")
    return float((truth - estimate) ** 2 / truth ** 2)
