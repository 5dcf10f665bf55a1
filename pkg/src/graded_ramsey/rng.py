"""Seeded, splittable random streams.

Every randomized routine takes an explicit integer seed.  Sub-streams are
derived by name so that adding a new consumer never shifts the draws seen by
an existing one::

    rng = stream(seed, "drc", layer)

The underlying generator is numpy's PCG64 seeded through ``SeedSequence``
with the name path folded into ``spawn_key``.
"""

from __future__ import annotations

import zlib

import numpy as np

SEED_BITS = 64


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed < 2**SEED_BITS:
        raise ValueError(f"seed must be a {SEED_BITS}-bit non-negative integer, got {seed}")
    return seed


def _key(part) -> int:
    if isinstance(part, (int, np.integer)):
        return int(part) & 0xFFFFFFFF
    return zlib.crc32(str(part).encode())


def stream(seed: int, *path) -> np.random.Generator:
    """Return the generator for ``seed`` and the named sub-stream ``path``."""
    ss = np.random.SeedSequence(check_seed(seed), spawn_key=tuple(_key(p) for p in path))
    return np.random.Generator(np.random.PCG64(ss))


def child_seed(seed: int, *path) -> int:
    """A derived 64-bit seed, for handing to another seeded routine."""
    ss = np.random.SeedSequence(check_seed(seed), spawn_key=tuple(_key(p) for p in path))
    return int(ss.generate_state(1, dtype=np.uint64)[0])
