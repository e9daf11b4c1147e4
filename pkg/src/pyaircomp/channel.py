"""
Channel gains, perfect-CSI inversion and additive white Gaussian noise.

SNR convention: every device transmits unit-amplitude symbols and the SNR is
the single-link ratio at the matched-filter input of one resource, so the
per-sample complex noise power is sigma2 = 10^(-snr_db/10).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from .errors import SingularChannelError

# Smallest channel magnitude that may be inverted.
SINGULAR_GAIN = 1e-12


class ChannelModel(enum.Enum):
    """Supported channel gain models."""

    IDENTITY = "Identity"
    RAYLEIGH_FLAT = "RayleighFlat"


@dataclass(frozen=True, eq=False)
class ChannelGains:
    """
    Complex gains between each device and the receiver on each resource.

    Attributes:
        h (np.ndarray): K x L complex gains
        model (ChannelModel): Model the gains were drawn from
    """

    h: np.ndarray
    model: ChannelModel

    def __post_init__(self):
        h = np.array(self.h, dtype=complex)
        if h.ndim != 2:
            raise ValueError(f"Channel gains must be a K x L matrix, got shape {h.shape}")
        if not np.all(np.isfinite(h)):
            raise ValueError("Channel gains must be finite")
        h.setflags(write=False)
        object.__setattr__(self, "h", h)

    @property
    def K(self) -> int:
        return self.h.shape[0]

    @property
    def L(self) -> int:
        return self.h.shape[1]

    def per_device(self) -> np.ndarray:
        """Return the flat gain h_k of every device (first resource)."""
        return self.h[:, 0]


@dataclass(frozen=True)
class NoiseSpec:
    """
    Per-sample complex noise power in linear units.

    Attributes:
        sigma2 (float): Noise power, >= 0
    """

    sigma2: float

    def __post_init__(self):
        if not self.sigma2 >= 0:
            raise ValueError(f"sigma2 must be >= 0, got {self.sigma2}")

    @classmethod
    def from_snr_db(cls, snr_db: float) -> "NoiseSpec":
        return cls(snr_to_sigma2(snr_db))


def draw_gains(K: int, L: int, model: ChannelModel, rng: np.random.Generator) -> ChannelGains:
    """
    Draw a K x L matrix of channel gains.

    Args:
        K (int): Number of devices
        L (int): Number of resources
        model (ChannelModel): Identity (all ones) or RayleighFlat
        rng (np.random.Generator): Random stream

    Returns:
        ChannelGains: Gains that are constant across resources for each device
    """
    if K < 1 or L < 1:
        raise ValueError(f"K and L must be >= 1, got K={K}, L={L}")
    if model is ChannelModel.IDENTITY:
        return ChannelGains(np.ones((K, L), dtype=complex), model)
    # unit average power: real and imaginary parts each carry 1/2
    h_k = (rng.standard_normal(K) + 1j * rng.standard_normal(K)) / math.sqrt(2.0)
    return ChannelGains(np.repeat(h_k[:, None], L, axis=1), model)


def csi_invert(h_k: complex) -> complex:
    """
    Return the channel-inverting amplitude a_k = conj(h_k) / |h_k|^2.

    Args:
        h_k (complex): Channel gain of one device

    Returns:
        complex: Pre-equalisation amplitude with a_k * h_k = 1

    Raises:
        SingularChannelError: If |h_k| is below 1e-12
    """
    magnitude = abs(h_k)
    if magnitude < SINGULAR_GAIN:
        raise SingularChannelError(f"Cannot invert channel with |h| = {magnitude:.3e}")
    return complex(np.conj(h_k) / magnitude ** 2)


def csi_invert_many(h: np.ndarray) -> np.ndarray:
    """Vectorised csi_invert over an array of gains."""
    h = np.asarray(h, dtype=complex)
    magnitude = np.abs(h)
    if np.any(magnitude < SINGULAR_GAIN):
        raise SingularChannelError(
            f"Cannot invert channel with |h| = {magnitude.min():.3e}"
        )
    return np.conj(h) / magnitude ** 2


def snr_to_sigma2(snr_db: float) -> float:
    """
    Convert a per-link SNR in dB to the per-sample noise power.

    Args:
        snr_db (float): SNR in dB; +inf means a noiseless link

    Returns:
        float: sigma2 = 10^(-snr_db/10)
    """
    if math.isnan(snr_db) or snr_db == -math.inf:
        raise ValueError(f"SNR must be finite or +inf, got {snr_db}")
    if snr_db == math.inf:
        return 0.0
    return 10.0 ** (-snr_db / 10.0)


def add_awgn(x: npt.ArrayLike, sigma2: float, rng: np.random.Generator) -> np.ndarray:
    """
    Add circularly-symmetric complex Gaussian noise of power sigma2 per sample.

    Args:
        x (array_like): Complex samples
        sigma2 (float): Total noise power per sample (sigma2/2 per dimension)
        rng (np.random.Generator): Random stream

    Returns:
        np.ndarray: Noisy copy of x
    """
    if sigma2 < 0:
        raise ValueError(f"sigma2 must be >= 0, got {sigma2}")
    x = np.asarray(x, dtype=complex)
    if sigma2 == 0:
        return x.copy()
    scale = math.sqrt(sigma2 / 2.0)
    noise = scale * (rng.standard_normal(x.shape) + 1j * rng.standard_normal(x.shape))
    return x + noise
