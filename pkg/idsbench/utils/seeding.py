"""
Seed substreams.

Every random draw in the toolkit comes from numpy's PCG64 generator seeded
through a SeedSequence whose spawn key is the task path, e.g.
``derive_seed(42, "superlearner", "fold", 3, 1)``. Substreams depend only on
(root seed, path), never on scheduling, so serial and parallel runs agree.
"""

import zlib
from typing import Union

import numpy as np

Key = Union[int, str]

# 63-bit so derived seeds stay valid JSON integers and non-negative.
_SEED_MASK = (1 << 63) - 1


def _key_to_int(key: Key) -> int:
    if isinstance(key, (int, np.integer)):
        if key < 0:
            raise ValueError(f"Substream keys must be non-negative, got {key}")
        return int(key)
    return zlib.crc32(str(key).encode("utf-8"))


def derive_seed(seed: int, *path: Key) -> int:
    """
    Derive the seed of a named substream.

    Args:
        seed (int): Root seed
        *path: Substream path elements (strings are hashed with CRC-32)

    Returns:
        int: A non-negative 63-bit seed
    """
    sequence = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(_key_to_int(k) for k in path))
    lo, hi = sequence.generate_state(2, dtype=np.uint32)
    return ((int(hi) << 32) | int(lo)) & _SEED_MASK


def make_rng(seed: int, *path: Key) -> np.random.Generator:
    """Return a PCG64 generator for the given substream."""
    return np.random.Generator(np.random.PCG64(derive_seed(seed, *path)))
