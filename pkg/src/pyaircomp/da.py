"""
Direct aggregation: amplitude-domain AirComp over one shared resource.

Each device sends g(s_k) as its amplitude, the channel sums the amplitudes,
and the receiver applies psi to the K-normalised sum. DA is simulated at
symbol level; its noise is real Gaussian with variance sigma2 / 2, the
matched-filter convention shared with TBMA.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, Optional

import numpy as np

from .aggregate import AggregationFn
from .attack import AttackSpec
from .channel import ChannelGains, csi_invert_many
from .model import MeasurementVector

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NomographicPair:
    """
    Pre- and post-processing that turn a sum into a function.

    Attributes:
        pre (Callable): Device-side map g, applied element-wise
        post (Callable): Receiver-side map psi
    """

    pre: Callable[[np.ndarray], np.ndarray]
    post: Callable[[float], float]


NOMOGRAPHIC: Dict[AggregationFn, NomographicPair] = {
    AggregationFn.ARITHMETIC_MEAN: NomographicPair(pre=lambda x: x, post=lambda y: y),
    AggregationFn.GEOMETRIC_MEAN: NomographicPair(pre=np.log, post=math.exp),
}


def nomographic_pair(fn: AggregationFn) -> NomographicPair:
    """
    Look up the nomographic representation of a function.

    Raises:
        ValueError: If DA cannot compute the function
    """
    try:
        return NOMOGRAPHIC[fn]
    except KeyError:
        raise ValueError(f"Direct aggregation does not support {fn.value}") from None


def da_attack_target(fn: AggregationFn, L: int) -> int:
    """
    Value the attackers send to move a DA estimate the most.

    The receiver normalises by K, so each attacker shifts the observation by
    g(target) / K whatever the legitimate data are; the worst case is the
    extreme value with the larger |g|.

    Args:
        fn (AggregationFn): ArithmeticMean or GeometricMean
        L (int): Number of values

    Returns:
        int: 1 or L
    """
    pair = nomographic_pair(fn)
    if L < 1:
        raise ValueError(f"L must be >= 1, got {L}")
    return L if abs(float(pair.pre(np.float64(L)))) >= abs(float(pair.pre(np.float64(1)))) else 1


def da_aggregate(
    s: MeasurementVector,
    fn: AggregationFn,
    attack: AttackSpec,
    sigma2: float,
    rng: np.random.Generator,
    target: Optional[int] = None,
) -> float:
    """
    Estimate a function by direct aggregation.

    The receiver observes sum_k g(s_k) + M g(target) + w and returns
    psi(observation / K); it normalises by the legitimate count K.

    Args:
        s (MeasurementVector): Legitimate measurements
        fn (AggregationFn): ArithmeticMean or GeometricMean
        attack (AttackSpec): Attacker population
        sigma2 (float): Per-sample channel noise power
        rng (np.random.Generator): Noise stream
        target (int, optional): Value the attackers transmit; falls back to
            the attack's fixed target

    Returns:
        float: The DA estimate

    Raises:
        ValueError: If fn is unsupported or an attack has no target
    """
    pair = nomographic_pair(fn)
    if sigma2 < 0:
        raise ValueError(f"sigma2 must be >= 0, got {sigma2}")
    observation = float(np.sum(pair.pre(s.entries.astype(float))))
    if attack.M > 0:
        target = attack.target if target is None else target
        if target is None or target < 1:
            raise ValueError(f"Attack target {target} must be a resource index >= 1")
        observation += attack.M * float(pair.pre(np.float64(target)))
        logger.debug("DA observation carries %d attackers at value %d", attack.M, target)
    if sigma2 > 0:
        observation += math.sqrt(sigma2 / 2.0) * rng.standard_normal()
    return float(pair.post(observation / s.K))


def da_transmit_energy(s: MeasurementVector, fn: AggregationFn, gains: Optional[ChannelGains] = None) -> float:
    """
    Total transmit energy of one DA access, sum of |a_k g(s_k)|^2.

    Unlike TBMA, the energy depends on the data and on the function.

    Args:
        s (MeasurementVector): Legitimate measurements
        fn (AggregationFn): ArithmeticMean or GeometricMean
        gains (ChannelGains, optional): Channel gains inverted by each device;
            unit gains when omitted
    """
    pair = nomographic_pair(fn)
    amplitudes = pair.pre(s.entries.astype(float))
    if gains is not None:
        amplitudes = amplitudes * np.abs(csi_invert_many(gains.per_device()))
    return float(np.sum(amplitudes ** 2))
