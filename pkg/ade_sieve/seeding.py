import numpy as np


def stream(seed, *key):
    """Independent generator for a (seed, key...) pair, e.g. one per prime"""
    seed_seq = np.random.SeedSequence([int(seed)] + [int(k) for k in key])
    return np.random.Generator(np.random.Philox(seed_seq))
