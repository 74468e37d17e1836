"""Reproducible random streams.

Every replica of every Monte Carlo routine owns an independent Philox stream
keyed by ``(seed, purpose, replica_index)``, so results never depend on the
number of replicas run alongside it or on scheduling order.  Normals are made
by inverse CDF from the top 52 bits of each raw 64-bit Philox output:
``z = ndtri((k + 0.5) / 2**52)``, which never hits 0 or 1.
"""
from __future__ import annotations

import numpy as np
from scipy.special import ndtri

# purpose tags
SIMULATION = 0
LYAPUNOV = 1
SPECTRAL = 2
GOLDIE = 3
FORWARD = 4
ASSUMPTIONS = 5

_SCALE = 2.0 ** -52


def stream(seed: int, purpose: int, index: int = 0) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(purpose), int(index)))
    return np.random.Generator(np.random.Philox(ss))


def uniforms(gen: np.random.Generator, size) -> np.ndarray:
    """Open-interval uniforms (k + 0.5) / 2**52."""
    n = int(np.prod(size))
    raw = gen.bit_generator.random_raw(n)
    return ((raw >> np.uint64(12)).astype(np.float64) + 0.5) * _SCALE if n else np.empty(0)


def normals(gen: np.random.Generator, size) -> np.ndarray:
    return ndtri(uniforms(gen, size)).reshape(size)
