"""
Discrete-time TBMA waveforms and the matched-filter bank receiver.

Resource l (1-based) is realised either as the complex exponential at
discrete frequency l over N samples (FSK) or as a rectangular pulse in the
l-th of L disjoint slots of N/L samples (PPM). Templates have unit energy.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import numpy.typing as npt

from .model import Scheme


@dataclass(frozen=True, eq=False)
class Waveform:
    """
    A synthesized transmit waveform.

    Attributes:
        samples (np.ndarray): N complex samples
        scheme (Scheme): Signalling the waveform belongs to
    """

    samples: np.ndarray
    scheme: Scheme

    @property
    def energy(self) -> float:
        return float(np.sum(np.abs(self.samples) ** 2))

    def __len__(self):
        return int(self.samples.size)


def _check_dimensions(scheme, L, N):
    if L < 1 or N < L:
        raise ValueError(f"Orthogonal signalling needs 1 <= L <= N, got L={L}, N={N}")
    if scheme is Scheme.PPM and N % L != 0:
        raise ValueError(f"PPM needs N divisible by L, got N={N}, L={L}")


@functools.lru_cache(maxsize=64)
def template_bank(scheme: Scheme, L: int, N: int) -> np.ndarray:
    """
    Return the L x N bank of unit-energy reference waveforms.

    Row l-1 holds the template of resource l. The array is cached and
    read-only, so it can be shared between trial workers.

    Args:
        scheme (Scheme): FSK or PPM
        L (int): Number of resources
        N (int): Samples per waveform

    Returns:
        np.ndarray: Read-only complex array of shape (L, N)
    """
    _check_dimensions(scheme, L, N)
    n = np.arange(N)
    if scheme is Scheme.FSK:
        freqs = np.arange(1, L + 1)[:, None]
        bank = np.exp(2j * np.pi * freqs * n[None, :] / N) / math.sqrt(N)
    else:
        width = N // L
        bank = np.zeros((L, N), dtype=complex)
        for slot in range(L):
            bank[slot, slot * width:(slot + 1) * width] = 1.0 / math.sqrt(width)
    bank.setflags(write=False)
    return bank


def synthesize(s: int, scheme: Scheme, N: int, a: complex = 1.0, L: Optional[int] = None) -> Waveform:
    """
    Synthesize the waveform a device holding value s transmits.

    Args:
        s (int): Measurement (resource index) in [1, L]
        scheme (Scheme): FSK or PPM
        N (int): Samples per waveform
        a (complex): Transmit amplitude, e.g. the CSI-inverting a_k
        L (int, optional): Number of resources; defaults to N

    Returns:
        Waveform: a times the unit-energy template of resource s

    Raises:
        ValueError: If s is outside [1, L]
    """
    L = N if L is None else L
    if not 1 <= s <= L:
        raise ValueError(f"Measurement {s} outside [1, {L}]")
    bank = template_bank(scheme, L, N)
    return Waveform(a * bank[s - 1], scheme)


def matched_filter_bank(y: npt.ArrayLike, scheme: Scheme, L: int) -> np.ndarray:
    """
    Correlate a received block with each of the L templates.

    Args:
        y (array_like): N received complex samples
        scheme (Scheme): FSK or PPM
        L (int): Number of resources

    Returns:
        np.ndarray: L complex matched-filter outputs <y, template_l>

    Raises:
        ValueError: If the block length is incompatible with L
    """
    y = np.asarray(y, dtype=complex)
    if y.ndim != 1:
        raise ValueError(f"Expected a 1-D block of samples, got shape {y.shape}")
    bank = template_bank(scheme, L, y.size)
    return bank.conj() @ y
