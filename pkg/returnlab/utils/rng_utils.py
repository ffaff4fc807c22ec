import numpy as np

from returnlab.exceptions import InvalidInputError


# Recorded in every summary so that runs can be reproduced bit for bit
RNG_ALGORITHM = "numpy.random.Philox"

_SEED_LIMIT = 2**64


def make_rng(seed):
    """
    Build the counter-based generator used by every simulation.

    Args:
        seed (int): A 64-bit non-negative seed.

    Returns:
        numpy.random.Generator: A Philox-backed generator.
    """
    if not isinstance(seed, (int, np.integer)) or isinstance(seed, bool):
        raise InvalidInputError(
            f"Seed must be an integer, got {seed!r}.", loc=["seed"]
        )
    if not 0 <= int(seed) < _SEED_LIMIT:
        raise InvalidInputError(
            "Seed must fit in 64 unsigned bits.", loc=["seed"]
        )
    return np.random.Generator(np.random.Philox(int(seed)))


def derive_seed(seed, *keys):
    """
    Independent 64-bit child seed of `seed` for a tuple of integer keys.

    Used to give every (cylinder, return index, ensemble member) its own
    stream while the run stays a function of the configured seeds.
    """
    sequence = np.random.SeedSequence(
        int(seed), spawn_key=tuple(int(key) for key in keys)
    )
    return int(sequence.generate_state(1, dtype=np.uint64)[0])
