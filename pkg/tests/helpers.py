"""Shared builders for randomized test inputs."""

from __future__ import annotations

import random

from bohrwalk.intmat import (
    CoordVector,
    TracelessIntMatrix,
    UnimodularMatrix,
    coords_to,
    elementary_generators,
)


def make_unimodular(d: int, length: int, rng: random.Random) -> UnimodularMatrix:
    """Random word of the given length over the transvection generators."""
    gens = elementary_generators(d)
    g = UnimodularMatrix.identity(d)
    for _ in range(length):
        g = g * gens[rng.randrange(len(gens))]
    return g


def make_traceless(d: int, bound: int, rng: random.Random) -> TracelessIntMatrix:
    n = d * d - 1
    coords = tuple(rng.randint(-bound, bound) for _ in range(n))
    return coords_to(CoordVector(d, coords))
