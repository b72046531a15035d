"""Random streams.

Every random operation takes an explicit seed. Independent streams for
trials and grid points are derived from a master seed with :func:`derive_seed`,
so results do not depend on execution order.
"""

from typing import Union

import numpy as np

SEED_MASK = (1 << 64) - 1

Seed = Union[int, np.integer]


def derive_seed(master: Seed, *indices: int) -> int:
    """Mix a master seed with a tuple of indices into a 64-bit seed.

    Args:
        master: master seed.
        indices: trial, point or stage indices (non-negative).

    Returns:
        A 64-bit integer seed, a pure function of the arguments.
    """
    entropy = [int(master) & SEED_MASK, *(int(i) for i in indices)]
    state = np.random.SeedSequence(entropy).generate_state(1, np.uint64)
    return int(state[0])


def generator(seed: Seed, *indices: int) -> np.random.Generator:
    """Numpy generator for ``seed``, optionally mixed with ``indices``."""
    if indices:
        seed = derive_seed(seed, *indices)
    return np.random.default_rng(int(seed) & SEED_MASK)
