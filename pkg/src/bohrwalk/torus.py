"""Exact points on the coordinate torus with a fixed prime denominator.

A point is stored as residues modulo a large prime Q, i.e. as the rational
point (r_1/Q, ..., r_n/Q).  Conjugation acts through integer matrices, so
the whole dynamics happens in modular arithmetic and never loses precision,
no matter how long the orbit.  Q defaults to the Mersenne prime 2^61 - 1,
which keeps Q-torsion unreachable at desk scale; such a point behaves as a
non-rational one for every statistic measured here.
"""

from __future__ import annotations

import cmath
import random
from dataclasses import dataclass
from functools import lru_cache

from .intmat import (
    AdjointOperator,
    CoordVector,
    UnimodularMatrix,
    adjoint_matrix,
    coord_rank,
)

MERSENNE61 = (1 << 61) - 1

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


@lru_cache(maxsize=None)
def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin; the base set covers all n < 3.3e24."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for p in small:
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class TorusPointQ:
    """Point of the coordinate torus with all coordinates in (1/Q) * Z."""

    d: int
    modulus: int
    residues: tuple[int, ...]

    def __post_init__(self) -> None:
        residues = tuple(int(r) for r in self.residues)
        if len(residues) != coord_rank(self.d):
            raise ValueError(
                f"expected {coord_rank(self.d)} residues for d={self.d}, got {len(residues)}"
            )
        if not is_prime(self.modulus):
            raise ValueError(f"modulus {self.modulus} is not prime")
        if any(r < 0 or r >= self.modulus for r in residues):
            raise ValueError("residues must lie in [0, modulus)")
        object.__setattr__(self, "residues", residues)

    @classmethod
    def zero(cls, d: int, modulus: int = MERSENNE61) -> "TorusPointQ":
        return cls(d, modulus, tuple(0 for _ in range(coord_rank(d))))

    @property
    def is_zero(self) -> bool:
        return all(r == 0 for r in self.residues)

    def to_json(self) -> dict:
        return {"Q": self.modulus, "residues": list(self.residues)}

    @classmethod
    def from_json(cls, doc: dict) -> "TorusPointQ":
        residues = doc["residues"]
        n = len(residues)
        d = 2
        while coord_rank(d) < n:
            d += 1
        if coord_rank(d) != n:
            raise ValueError(f"residue count {n} is not of the form d*d-1")
        return cls(d, int(doc["Q"]), tuple(int(r) for r in residues))


def act(op: UnimodularMatrix | AdjointOperator, x: TorusPointQ) -> TorusPointQ:
    """Dual action on the torus: residues go through the transposed operator.

    The defining contract is the pairing identity
    character(act(g, x), h) == character(x, conjugate(g, h)) for all h, which
    forces the transpose of the conjugation matrix and makes the action a
    bijection of the residue lattice.
    """
    ad = adjoint_matrix(op) if isinstance(op, UnimodularMatrix) else op
    if ad.d != x.d:
        raise ValueError(f"dimension mismatch: operator d={ad.d}, point d={x.d}")
    m = ad.matrix
    n = len(m)
    r = x.residues
    q = x.modulus
    new = tuple(sum(m[j][i] * r[j] for j in range(n)) % q for i in range(n))
    return TorusPointQ(x.d, q, new)


def phase_index(x: TorusPointQ, h: CoordVector | tuple[int, ...]) -> int:
    """Exact s with <x, h> = s/Q mod 1; computed before any floating step."""
    coords = h.coords if isinstance(h, CoordVector) else tuple(h)
    if len(coords) != len(x.residues):
        raise ValueError("frequency length does not match point dimension")
    return sum(r * c for r, c in zip(x.residues, coords)) % x.modulus


def character(x: TorusPointQ, h: CoordVector | tuple[int, ...]) -> complex:
    """exp(2 pi i <x, h>) evaluated from the exact phase index."""
    s = phase_index(x, h)
    return cmath.exp(2j * cmath.pi * (s / x.modulus))


@dataclass(frozen=True)
class Character:
    """Frequency vector acting on torus points through the coordinate pairing."""

    h: CoordVector

    def phase_index(self, x: TorusPointQ) -> int:
        return phase_index(x, self.h)

    def __call__(self, x: TorusPointQ) -> complex:
        return character(x, self.h)


def random_point(d: int, modulus: int = MERSENNE61, seed: int = 0) -> TorusPointQ:
    """Uniform nonzero point, reproducible from the seed.

    randrange is exactly uniform on [0, Q); the all-zero draw is rejected so
    the origin is never returned.
    """
    if not is_prime(modulus):
        raise ValueError(f"modulus {modulus} is not prime")
    rng = random.Random(seed)
    n = coord_rank(d)
    while True:
        residues = tuple(rng.randrange(modulus) for _ in range(n))
        if any(residues):
            return TorusPointQ(d, modulus, residues)
