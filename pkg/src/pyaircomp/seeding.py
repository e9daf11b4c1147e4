"""
Deterministic random streams for trials and rounds.

Every random draw in PyAirComp comes from a generator derived from a master
seed and a tuple of keys, so results do not depend on execution order or on
how many worker threads run the trials.
"""
import hashlib
from typing import Hashable

import numpy as np


def _key_words(keys):
    text = "|".join(repr(float(k)) if isinstance(k, float) else str(k) for k in keys)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    # four 32-bit words of entropy from the key digest
    return [int.from_bytes(digest[i:i + 4], "little") for i in range(0, 16, 4)]


def derive_seed_sequence(master_seed: int, *keys: Hashable) -> np.random.SeedSequence:
    """
    Build a SeedSequence keyed by a master seed and arbitrary hashable keys.

    Args:
        master_seed (int): Non-negative master seed
        *keys: Strings, integers or floats identifying the stream

    Returns:
        np.random.SeedSequence: Sequence unique to (master_seed, keys)
    """
    if master_seed < 0:
        raise ValueError(f"master_seed must be non-negative, got {master_seed}")
    return np.random.SeedSequence([int(master_seed)] + _key_words(keys))


def derive_rng(master_seed: int, *keys: Hashable) -> np.random.Generator:
    """
    Return an independent generator for (master_seed, keys).

    Args:
        master_seed (int): Non-negative master seed
        *keys: Strings, integers or floats identifying the stream

    Returns:
        np.random.Generator: A PCG64 generator
    """
    return np.random.default_rng(derive_seed_sequence(master_seed, *keys))
