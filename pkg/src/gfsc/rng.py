"""Seeded random streams.

Stream derivation rule: a stream is identified by a root ``seed`` and a
path of non-negative integers (for example ``(n, GRAPH)`` or
``(n, SIGNALS)``).  The generator is ``Philox`` keyed by
``SeedSequence(entropy=seed, spawn_key=path)``, so every (seed, path)
pair yields an independent, reproducible stream regardless of the order
in which trials execute.
"""
import numpy as np

# purpose tags used as the last element of a stream path
GRAPH = 0
SIGNALS = 1
KMEANS = 2


def stream(seed, *path):
    """Return the generator for ``(seed, *path)``.

    ``seed`` may itself be a tuple ``(seed, *prefix)``; a Generator is
    returned unchanged.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, tuple):
        seed, path = seed[0], tuple(seed[1:]) + path
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(x) for x in path))
    return np.random.Generator(np.random.Philox(ss))


def box_muller(rng, size):
    """Standard normal draws from the uniform stream of ``rng``.

    Pairs of uniforms (u1, u2) map to ``sqrt(-2 log(1 - u1))`` times
    ``cos(2 pi u2)`` and ``sin(2 pi u2)``; ``1 - u1`` lies in (0, 1].
    """
    size = int(size)
    m = (size + 1) // 2
    u = rng.random((2, m))
    radius = np.sqrt(-2.0 * np.log1p(-u[0]))
    angle = 2.0 * np.pi * u[1]
    z = np.empty(2 * m)
    z[0::2] = radius * np.cos(angle)
    z[1::2] = radius * np.sin(angle)
    return z[:size]
