"""
Robust correction of a received type.

The correction runs three element-wise passes over the L resources:

1. noise thresholding: entries with |r_l| < theta1 are zeroed;
2. percentile truncation: nonzero entries outside the [p_lo, p_hi]
   empirical quantiles of the nonzero values are zeroed;
3. local outlier compensation: on the device-count scale K*r, an entry that
   departs from its neighbours by more than theta2 is replaced by the mean
   of its neighbours (a single neighbour at the boundaries).

Step 3 compares against its input only, so all resources can be processed
independently. The corrected type is not renormalised; estimators divide by
the retained mass.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Union

import numpy as np
import numpy.typing as npt

from .errors import EstimationError
from .model import Measurement
from .tbma import NoisyType, type_noise_std

# Slack on count-scale comparisons so that K * (k / K) == k.
_COUNT_TOL = 1e-9


class OutlierRule(enum.Enum):
    """When step 3 treats an entry as an outlier."""

    # departs from every existing neighbour
    SPIKE = "spike"
    # departs from any neighbour
    EITHER = "either"


class Theta1Rule(enum.Enum):
    """How the default noise threshold is derived from the noise power."""

    TYPE_STD = "type-std"
    LITERAL = "literal"


@dataclass(frozen=True)
class RobustParams:
    """
    Thresholds of the robust correction.

    Attributes:
        theta1 (float): Noise threshold on the type scale
        theta2 (float): Neighbour deviation threshold on the device-count scale
        p_lo (float): Lower truncation quantile
        p_hi (float): Upper truncation quantile
        outlier_rule (OutlierRule): Step 3 outlier test
    """

    theta1: float = 0.0
    theta2: float = 5.0
    p_lo: float = 0.01
    p_hi: float = 0.99
    outlier_rule: OutlierRule = OutlierRule.SPIKE

    def __post_init__(self):
        if not self.theta1 >= 0:
            raise ValueError(f"theta1 must be >= 0, got {self.theta1}")
        if not self.theta2 >= 0:
            raise ValueError(f"theta2 must be >= 0, got {self.theta2}")
        if not 0.0 <= self.p_lo < self.p_hi <= 1.0:
            raise ValueError(f"Quantiles need 0 <= p_lo < p_hi <= 1, got {self.p_lo}, {self.p_hi}")

    @classmethod
    def for_noise(cls, sigma2: float, K: int, rule: Theta1Rule = Theta1Rule.TYPE_STD, **kwargs) -> "RobustParams":
        """
        Build parameters whose theta1 follows the channel noise.

        Args:
            sigma2 (float): Per-sample channel noise power
            K (int): Legitimate device count
            rule (Theta1Rule): 3 x type-noise std, or the literal 3 sigma2
            **kwargs: Remaining RobustParams fields

        Returns:
            RobustParams: Parameters with theta1 filled in
        """
        return cls(theta1=default_theta1(sigma2, K, rule), **kwargs)


def default_theta1(sigma2: float, K: int, rule: Theta1Rule = Theta1Rule.TYPE_STD) -> float:
    """Noise threshold: 3 * sqrt(sigma2/2)/K, or 3 * sigma2 under the literal rule."""
    if rule is Theta1Rule.LITERAL:
        return 3.0 * sigma2
    return 3.0 * type_noise_std(sigma2, K)


@dataclass(frozen=True, eq=False)
class CorrectedType:
    """
    Output of the robust correction.

    Attributes:
        r_hat (np.ndarray): Read-only corrected length-L vector
        K (int): Normalising device count carried over from the input
    """

    r_hat: np.ndarray
    K: int

    def __post_init__(self):
        r_hat = np.array(self.r_hat, dtype=float)
        r_hat.setflags(write=False)
        object.__setattr__(self, "r_hat", r_hat)

    @property
    def retained_mass(self) -> float:
        return float(np.clip(self.r_hat, 0.0, None).sum())


def threshold_noise(r: Union[NoisyType, np.ndarray], theta1: float) -> np.ndarray:
    """
    Zero every entry whose magnitude is below the noise threshold.

    Args:
        r (NoisyType or array_like): Received type
        theta1 (float): Threshold, >= 0

    Returns:
        np.ndarray: r_l if |r_l| >= theta1 else 0
    """
    if theta1 < 0:
        raise ValueError(f"theta1 must be >= 0, got {theta1}")
    values = _as_vector(r)
    return np.where(np.abs(values) >= theta1, values, 0.0)


def percentile_truncate(r: npt.ArrayLike, p_lo: float, p_hi: float) -> np.ndarray:
    """
    Zero the nonzero entries that fall outside the [p_lo, p_hi] quantiles.

    Quantiles are taken over the nonzero entries only, with linear
    interpolation between sorted values. Zero entries pass through.

    Args:
        r (array_like): Type after noise thresholding
        p_lo (float): Lower quantile in [0, 1)
        p_hi (float): Upper quantile in (p_lo, 1]

    Returns:
        np.ndarray: Truncated copy of r
    """
    if not 0.0 <= p_lo < p_hi <= 1.0:
        raise ValueError(f"Quantiles need 0 <= p_lo < p_hi <= 1, got {p_lo}, {p_hi}")
    values = _as_vector(r).copy()
    nonzero = values != 0
    if not np.any(nonzero):
        return values
    support = values[nonzero]
    q_lo = -math.inf if p_lo == 0.0 else np.quantile(support, p_lo)
    q_hi = math.inf if p_hi == 1.0 else np.quantile(support, p_hi)
    outside = nonzero & ((values < q_lo) | (values > q_hi))
    values[outside] = 0.0
    return values


def local_outlier_compensate(r: npt.ArrayLike, theta2: float, K: int,
                             rule: OutlierRule = OutlierRule.SPIKE) -> np.ndarray:
    """
    Replace entries that deviate from their neighbours by the neighbours' mean.

    Tests run on the device-count scale K*r against the input vector; the
    boundary entries use their single neighbour for both the test and the
    replacement.

    Args:
        r (array_like): Type after percentile truncation
        theta2 (float): Deviation threshold in devices
        K (int): Normalising device count
        rule (OutlierRule): SPIKE replaces entries far from every neighbour,
            EITHER replaces entries far from any neighbour

    Returns:
        np.ndarray: Compensated copy of r
    """
    if theta2 < 0:
        raise ValueError(f"theta2 must be >= 0, got {theta2}")
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    values = _as_vector(r)
    L = values.size
    if L < 2:
        return values.copy()

    counts = K * values
    gap = np.abs(np.diff(counts)) > theta2 + _COUNT_TOL
    far_left = np.concatenate(([False], gap))
    far_right = np.concatenate((gap, [False]))
    has_left = np.arange(L) > 0
    has_right = np.arange(L) < L - 1

    if rule is OutlierRule.SPIKE:
        outlier = (far_left | ~has_left) & (far_right | ~has_right)
    else:
        outlier = far_left | far_right

    neighbour_mean = np.empty(L)
    neighbour_mean[1:-1] = (values[:-2] + values[2:]) / 2.0
    neighbour_mean[0] = values[1]
    neighbour_mean[-1] = values[-2]
    return np.where(outlier, neighbour_mean, values)


def robust_correct(r: NoisyType, params: RobustParams) -> CorrectedType:
    """
    Run noise thresholding, percentile truncation and outlier compensation.

    Args:
        r (NoisyType): Received (possibly corrupted) type
        params (RobustParams): Thresholds and quantiles

    Returns:
        CorrectedType: The corrected, unnormalised type
    """
    step1 = threshold_noise(r, params.theta1)
    step2 = percentile_truncate(step1, params.p_lo, params.p_hi)
    step3 = local_outlier_compensate(step2, params.theta2, r.K, params.outlier_rule)
    return CorrectedType(step3, r.K)


def median_from_type(r: npt.ArrayLike) -> Measurement:
    """
    Lower median of the distribution a type describes.

    Negative entries are clamped to zero and the rest normalised to unit
    mass; the result is the smallest resource whose cumulative mass reaches
    one half.

    Args:
        r (NoisyType, CorrectedType or array_like): Type

    Returns:
        int: Resource index in [1, L]

    Raises:
        EstimationError: If the type has no positive mass
    """
    values = np.clip(_as_vector(r), 0.0, None)
    total = values.sum()
    if not total > 0:
        raise EstimationError("Type has no positive mass to take a median of")
    cdf = np.cumsum(values) / total
    return int(np.argmax(cdf >= 0.5 - 1e-12)) + 1


def _as_vector(r) -> np.ndarray:
    if isinstance(r, NoisyType):
        return r.r
    if isinstance(r, CorrectedType):
        return r.r_hat
    return np.asarray(r, dtype=float)
