import numpy as np


def make_rng(seed, *keys) -> np.random.Generator:
    """
    Independent generator for a (seed, key...) tuple.

    Keys are extra integers (user id, item id, worker index ...) mixed into the
    seed sequence, so every pair or worker gets its own reproducible stream.
    """
    entropy = [int(seed)] + [int(k) for k in keys]
    return np.random.default_rng(np.random.SeedSequence(entropy))
