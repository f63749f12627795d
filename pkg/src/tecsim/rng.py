"""Counter-based random streams.

Every random draw in the package comes from a Philox generator keyed by
``(seed, stream name, index)``.  Trial ``i`` of an experiment therefore sees
the same numbers no matter how trials are batched or spread over threads.
"""
import zlib

import numpy as np


def stream_id(name):
    return zlib.crc32(name.encode("ascii"))


def stream_rng(seed, name, index=0):
    """Generator for substream ``index`` of the named stream."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(stream_id(name), int(index)))
    return np.random.Generator(np.random.Philox(ss))


def complex_normal(rng, shape):
    """i.i.d. CN(0, 1) samples."""
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return (re + 1j * im) / np.sqrt(2.0)
