"""
Domain types shared by every PyAirComp module.

This module holds the measurement containers, the system configuration and the
uniform quantizer that maps real values onto the L orthogonal resources.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
import numpy.typing as npt

# A measurement is a 1-based bin index in [1, L].
Measurement = int


class Scheme(enum.Enum):
    """Orthogonal signalling used to realise the L resources."""

    FSK = "FSK"
    PPM = "PPM"


def _check_range(lo, hi, L):
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ValueError(f"Quantizer range must be finite, got [{lo}, {hi}]")
    if lo >= hi:
        raise ValueError(f"Quantizer range requires lo < hi, got [{lo}, {hi}]")
    if L < 2:
        raise ValueError(f"Quantizer requires L >= 2, got {L}")


def quantize_array(values: npt.ArrayLike, lo: float, hi: float, L: int) -> np.ndarray:
    """
    Quantize an array of real values onto bins 1..L.

    Bins are uniform over [lo, hi], half-open on the left and closed at the
    final edge; a value on an internal edge goes to the upper bin. Values
    outside [lo, hi] are clipped.

    Args:
        values (array_like): Real values
        lo (float): Lower edge of the first bin
        hi (float): Upper edge of the last bin
        L (int): Number of bins

    Returns:
        np.ndarray: Integer bin indices in [1, L]

    Raises:
        ValueError: If any value is not finite or the range is invalid
    """
    _check_range(lo, hi, L)
    x = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("Cannot quantize non-finite values")
    x = np.clip(x, lo, hi)
    bins = np.floor((x - lo) * L / (hi - lo)).astype(np.int64) + 1
    return np.clip(bins, 1, L)


def quantize(value: float, lo: float, hi: float, L: int) -> Measurement:
    """
    Quantize a single real value onto a bin index in [1, L].

    Args:
        value (float): Value to quantize
        lo (float): Lower edge of the first bin
        hi (float): Upper edge of the last bin
        L (int): Number of bins

    Returns:
        int: Bin index in [1, L]
    """
    return int(quantize_array([value], lo, hi, L)[0])


def bin_to_value(position: npt.ArrayLike, lo: float, hi: float, L: int) -> Union[float, np.ndarray]:
    """
    Map a (possibly fractional) bin position back onto the value axis.

    This is the continuous inverse of the quantizer: bin centres map to the
    centre values, and positions outside [1, L] extrapolate linearly.

    Args:
        position (float or array_like): Bin position(s)
        lo (float): Lower edge of the first bin
        hi (float): Upper edge of the last bin
        L (int): Number of bins

    Returns:
        float or np.ndarray: Value(s) on the original axis
    """
    _check_range(lo, hi, L)
    width = (hi - lo) / L
    result = lo + (np.asarray(position, dtype=float) - 0.5) * width
    return float(result) if np.ndim(result) == 0 else result


def dequantize(m: Measurement, lo: float, hi: float, L: int) -> float:
    """
    Return the centre of bin m.

    Args:
        m (int): Bin index in [1, L]
        lo (float): Lower edge of the first bin
        hi (float): Upper edge of the last bin
        L (int): Number of bins

    Returns:
        float: Centre of the bin

    Raises:
        ValueError: If m is outside [1, L]
    """
    if not 1 <= m <= L:
        raise ValueError(f"Bin {m} outside [1, {L}]")
    return bin_to_value(m, lo, hi, L)


@dataclass(frozen=True, eq=False)
class MeasurementVector:
    """
    The quantized local data of the legitimate devices.

    Attributes:
        entries (np.ndarray): Read-only integer bins, one per device
        L (int): Number of resources the bins index into
    """

    entries: np.ndarray
    L: int

    def __post_init__(self):
        entries = np.array(self.entries, dtype=np.int64).reshape(-1)
        if entries.size == 0:
            raise ValueError("A measurement vector needs at least one device")
        if self.L < 1:
            raise ValueError(f"L must be positive, got {self.L}")
        if entries.min() < 1 or entries.max() > self.L:
            raise ValueError(f"Measurements must lie in [1, {self.L}]")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_values(cls, values: npt.ArrayLike, lo: float, hi: float, L: int) -> "MeasurementVector":
        """Quantize real values into a measurement vector."""
        return cls(quantize_array(values, lo, hi, L), L)

    @property
    def K(self) -> int:
        """Number of legitimate devices."""
        return int(self.entries.size)

    def counts(self) -> np.ndarray:
        """Return K_l, the number of devices holding each value l = 1..L."""
        return np.bincount(self.entries, minlength=self.L + 1)[1:].astype(float)

    def __len__(self):
        return self.K


@dataclass(frozen=True)
class SystemConfig:
    """
    Physical-layer parameters of one TBMA access.

    Attributes:
        K (int): Legitimate device count
        L (int): Number of orthogonal resources
        snr_db (float): Per-link SNR in dB (+inf means noiseless)
        scheme (Scheme): FSK or PPM
        N (int, optional): Samples per waveform; defaults to L
    """

    K: int
    L: int
    snr_db: float = 30.0
    scheme: Scheme = Scheme.PPM
    N: Optional[int] = None

    def __post_init__(self):
        if self.N is None:
            object.__setattr__(self, "N", self.L)
        if self.K < 1:
            raise ValueError(f"K must be >= 1, got {self.K}")
        if self.L < 2:
            raise ValueError(f"L must be >= 2, got {self.L}")
        if self.N < self.L:
            raise ValueError(f"N must be >= L for orthogonality, got N={self.N}, L={self.L}")
        if self.scheme is Scheme.PPM and self.N % self.L != 0:
            raise ValueError(f"PPM needs N divisible by L, got N={self.N}, L={self.L}")
        if math.isnan(self.snr_db):
            raise ValueError("snr_db must not be NaN")

