"""
Type formation for type-based multiple access.

Two fidelities produce the same noisy type r = p + w:

* symbol level: count the devices per resource and add real Gaussian noise
  of variance sigma2 / (2 K^2) per entry;
* waveform level: synthesize every device's CSI-compensated waveform, add
  AWGN, run the matched-filter bank, keep the real parts and divide by K.

Attackers add mass on a single resource; the receiver always normalises by
the K legitimate devices.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .attack import AttackSpec
from .channel import ChannelGains, ChannelModel, add_awgn, csi_invert_many, draw_gains
from .model import MeasurementVector, Scheme
from .waveform import matched_filter_bank, template_bank

logger = logging.getLogger(__name__)


def type_noise_std(sigma2: float, K: int) -> float:
    """Standard deviation of the real noise on each type entry, sqrt(sigma2/2)/K."""
    return math.sqrt(sigma2 / 2.0) / K


@dataclass(frozen=True, eq=False)
class NoisyType:
    """
    The received, K-normalised histogram of the transmitted data.

    Attributes:
        r (np.ndarray): Read-only length-L real vector
        K (int): Number of legitimate devices used for normalisation
    """

    r: np.ndarray
    K: int

    def __post_init__(self):
        r = np.array(self.r, dtype=float).reshape(-1)
        if self.K < 1:
            raise ValueError(f"K must be >= 1, got {self.K}")
        r.setflags(write=False)
        object.__setattr__(self, "r", r)

    @property
    def L(self) -> int:
        return int(self.r.size)

    @property
    def mass(self) -> float:
        return float(self.r.sum())

    def counts(self) -> np.ndarray:
        """The type on the device-count scale, K * r."""
        return self.K * self.r


def _check_measurements(s: MeasurementVector, L: int):
    if s.K == 0:
        raise ValueError("Cannot form a type from an empty measurement vector")
    if s.entries.max() > L:
        raise ValueError(f"Measurements exceed L={L}")


def form_type_symbol(s: MeasurementVector, L: int, sigma2: float, rng: np.random.Generator) -> NoisyType:
    """
    Form the noisy type at symbol level.

    Args:
        s (MeasurementVector): Legitimate measurements in [1, L]
        L (int): Number of resources
        sigma2 (float): Per-sample channel noise power
        rng (np.random.Generator): Noise stream

    Returns:
        NoisyType: r_l = K_l / K + n_l with n_l ~ N(0, sigma2 / (2 K^2))
    """
    _check_measurements(s, L)
    K = s.K
    p = np.bincount(s.entries, minlength=L + 1)[1:L + 1] / K
    if sigma2 > 0:
        p = p + type_noise_std(sigma2, K) * rng.standard_normal(L)
    return NoisyType(p, K)


def form_type_waveform(
    s: MeasurementVector,
    gains: Optional[ChannelGains],
    L: int,
    N: int,
    sigma2: float,
    scheme: Scheme,
    rng: np.random.Generator,
    attackers: int = 0,
    target: Optional[int] = None,
    attacker_gains: Optional[ChannelGains] = None,
) -> NoisyType:
    """
    Form the noisy type from simulated waveforms.

    Every device pre-equalises with a_k = conj(h_k)/|h_k|^2 and transmits the
    template of its measurement; attackers do the same on resource `target`.
    The superposition plus AWGN is matched-filtered, the real parts are kept
    and the result is divided by K.

    Args:
        s (MeasurementVector): Legitimate measurements
        gains (ChannelGains, optional): K x L legitimate gains; Identity if None
        L (int): Number of resources
        N (int): Samples per waveform
        sigma2 (float): Per-sample noise power
        scheme (Scheme): FSK or PPM
        rng (np.random.Generator): Noise (and attacker gain) stream
        attackers (int): Number of attackers M
        target (int, optional): Attacked resource, required when attackers > 0
        attacker_gains (ChannelGains, optional): M x L attacker gains; drawn
            from the legitimate gain model if omitted

    Returns:
        NoisyType: The received type

    Raises:
        SingularChannelError: If a gain cannot be inverted
    """
    _check_measurements(s, L)
    K = s.K
    if gains is None:
        gains = draw_gains(K, L, ChannelModel.IDENTITY, rng)
    if gains.K != K:
        raise ValueError(f"Expected gains for {K} devices, got {gains.K}")
    bank = template_bank(scheme, L, N)

    h = gains.per_device()
    effective = h * csi_invert_many(h)
    y = effective @ bank[s.entries - 1]

    if attackers > 0:
        if target is None or not 1 <= target <= L:
            raise ValueError(f"Attack target {target} outside [1, {L}]")
        if attacker_gains is None:
            attacker_gains = draw_gains(attackers, L, gains.model, rng)
        h_m = attacker_gains.per_device()
        y = y + np.sum(h_m * csi_invert_many(h_m)) * bank[target - 1]

    y = add_awgn(y, sigma2, rng)
    return NoisyType(np.real(matched_filter_bank(y, scheme, L)) / K, K)


def corrupt_type(r: NoisyType, attack: AttackSpec, target: Optional[int] = None) -> NoisyType:
    """
    Add the attackers' mass M/K on the attacked resource (symbol level).

    Args:
        r (NoisyType): Type before the attack
        attack (AttackSpec): Attacker population
        target (int, optional): Resolved attacked resource; falls back to
            the attack's fixed target

    Returns:
        NoisyType: The corrupted type, still normalised by K
    """
    if attack.M == 0:
        return r
    target = attack.target if target is None else target
    if target is None or not 1 <= target <= r.L:
        raise ValueError(f"Attack target {target} outside [1, {r.L}]")
    corrupted = r.r.copy()
    corrupted[target - 1] += attack.M / r.K
    logger.debug("Injected %d attackers on resource %d", attack.M, target)
    return NoisyType(corrupted, r.K)


def tbma_transmit_energy(gains: Optional[ChannelGains], K: int) -> float:
    """
    Total transmit energy of one TBMA access, sum of |a_k|^2.

    The energy depends only on the channel, not on the data or on the
    function computed at the receiver.
    """
    if gains is None:
        return float(K)
    return float(np.sum(np.abs(csi_invert_many(gains.per_device())) ** 2))
