"""Reproducible random streams.

Every random quantity in the package is drawn from a counter-based Philox
generator keyed by ``(seed, *keys)``.  Trial ``t`` of an experiment uses
``stream(seed, t)`` so results do not depend on how trials are scheduled
across workers.
"""

import numpy as np


def stream(seed, *keys):
    """Return an independent generator for the key path ``(seed, *keys)``."""
    if seed is None:
        raise ValueError("seed must be an integer, not None")
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.Philox(ss))


def as_generator(rng_or_seed):
    """Accept a seed or an existing generator."""
    if isinstance(rng_or_seed, np.random.Generator):
        return rng_or_seed
    return stream(rng_or_seed)
