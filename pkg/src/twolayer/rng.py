"""Random number generation.

Every stochastic operation takes an explicit ``numpy.random.Generator``. The
package always builds them on the counter-based Philox bit generator so that a
seed pins the stream on every platform, and so the compiled kernels can draw
from the same stream through the C-level ``bitgen_t`` interface.
"""

import numpy as np


def make_rng(seed):
    """Return a Philox-backed generator for an integer seed."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.Philox(int(seed) & 0xFFFFFFFFFFFFFFFF))


def trial_seed(base_seed, index):
    """Seed of the ``index``-th independent trial (``base_seed XOR index``)."""
    return (int(base_seed) ^ int(index)) & 0xFFFFFFFFFFFFFFFF
