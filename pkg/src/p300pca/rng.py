"""Seed handling.

Every random decision in the package draws from a generator derived from one
64-bit root seed plus a purpose path, e.g. ``derive_rng(seed, "split", 3)``.
Purpose strings are mapped to integers with CRC32, so the same (seed, path)
always yields the same independent stream regardless of call order.
"""

import zlib

import numpy as np


def _key(part):
    if isinstance(part, (int, np.integer)):
        return int(part)
    return zlib.crc32(str(part).encode("utf-8"))


def derive_seed_sequence(seed, *purpose):
    return np.random.SeedSequence(int(seed) & (2**64 - 1), spawn_key=tuple(_key(p) for p in purpose))


def derive_rng(seed, *purpose):
    """Return a ``numpy.random.Generator`` for ``purpose`` under ``seed``."""
    return np.random.default_rng(derive_seed_sequence(seed, *purpose))


def derive_int(seed, *purpose):
    """Derive a child integer seed (used to hand seeds to nested stages)."""
    return int(derive_seed_sequence(seed, *purpose).generate_state(1, dtype=np.uint64)[0])
