"""Seed derivation.

Every random stream is a PCG64 generator keyed by a ``SeedSequence`` built
from a 64-bit master seed plus a spawn key. A run with seed ``s`` uses::

    (s, GRAPH)      topology generation
    (s, INIT)       initial population
    (s, EVOLUTION)  all generations, drawn in a fixed per-generation order

Sweep cells get their own run seed from ``derive_seed(master, axis, i, r)``,
so no two cells share a stream regardless of how they are scheduled.
"""

from __future__ import annotations

import secrets

import numpy as np

GRAPH = 0
INIT = 1
EVOLUTION = 2

SEED_MAX = 2**64 - 1


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= SEED_MAX:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def stream(seed: int, *key: int) -> np.random.Generator:
    ss = np.random.SeedSequence(check_seed(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


def derive_seed(master: int, *key: int) -> int:
    """Child run seed for ``key`` under ``master`` (a 64-bit hash of both)."""
    ss = np.random.SeedSequence(check_seed(master), spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def fresh_seed() -> int:
    return secrets.randbits(63)
