"""Deterministic random-number streams.

Every stochastic component draws from a named substream derived from the
single run seed, so adding a consumer never shifts the draws seen by the
others and any component can be reproduced in isolation.
"""

import numpy as np

# Registry of substream identifiers.  Append only; renumbering existing
# entries changes every seeded result.
STREAM_IDS = {
    "geometry": 1,
    "bath": 2,
    "sweep": 3,
    "montecarlo": 4,
}


def substream(seed, name):
    """Return a Generator for the named substream of ``seed``."""
    if name not in STREAM_IDS:
        raise KeyError("unknown rng stream %r" % name)
    ss = np.random.SeedSequence(seed, spawn_key=(STREAM_IDS[name],))
    return np.random.Generator(np.random.PCG64(ss))
