import numpy as np

# stream tags keep per-instance random draws independent of each other
MISMATCH_STREAM = 0
NOISE_STREAM = 1
OPERAND_STREAM = 2
RECORD_STREAM = 3
QUANT_STREAM = 4


def rng_for(seed: int, *key: int) -> np.random.Generator:
    """Independent, reproducible generator for ``(seed, *key)``."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, key)]))
