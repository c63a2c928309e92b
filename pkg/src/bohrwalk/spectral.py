"""Rotation-system diagnostics for zero-centered window sets.

The system is translation on T^n by the image of the ambient group under
the frequency homomorphism, observed through the indicator of a product
window.  Its correlation sequence has a closed form, the product over
coordinates of the overlap between an interval and its translate, which
turns several limit statements (vanishing box averages of characters,
convergence of correlation averages, absence of mass at rational points)
into finite computations.

Correlation averages and the rational-point mass estimator run over
centered sup-norm boxes.  Character averages use the one-sided box
{1, ..., k} per coordinate instead: over that box a character of exact
period q sums to zero whenever q divides k, so the rational case cancels
exactly rather than up to rounding.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .bohr import BohrSpec, SpecValidationError, zero_symmetric_sub
from .surd import (
    DEFAULT_BITS,
    MAX_BITS,
    SurdNumber,
    circle_distance_interval,
    fractional_interval,
)

_EIGHTH = Fraction(1, 8)

Frequency = Fraction | SurdNumber


@dataclass(frozen=True)
class RotationSystem:
    """Translation frequencies plus a zero-centered product window.

    Radii are capped at 1/8 so a window never overlaps a translate of itself
    on both sides of the circle, which keeps the correlation formula a single
    product of interval overlaps.
    """

    frequencies: tuple[tuple[SurdNumber, ...], ...]
    radii: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        freq = tuple(tuple(row) for row in self.frequencies)
        radii = tuple(Fraction(r) for r in self.radii)
        if not freq or len(freq) != len(radii):
            raise SpecValidationError("need one radius per frequency row")
        for i, row in enumerate(freq):
            if not row:
                raise SpecValidationError(f"frequency row {i} is empty")
            if all(f.is_rational for f in row):
                raise SpecValidationError(
                    f"frequency row {i} is rational-only; the orbit closure "
                    "would not fill the torus"
                )
        for r in radii:
            if not 0 < r <= _EIGHTH:
                raise SpecValidationError(f"radius {r} must lie in (0, 1/8]")
        object.__setattr__(self, "frequencies", freq)
        object.__setattr__(self, "radii", radii)

    @classmethod
    def from_bohr(cls, spec: BohrSpec) -> "RotationSystem":
        """System of the halved sub-window of a zero-centered descriptor."""
        halved = zero_symmetric_sub(spec)
        return cls(halved.frequencies, tuple(r for _, r in halved.window))

    @property
    def n(self) -> int:
        return len(self.frequencies)

    @property
    def rank(self) -> int:
        return len(self.frequencies[0])

    @property
    def window_volume(self) -> Fraction:
        return math.prod((2 * r for r in self.radii), start=Fraction(1))


def interval_overlap(distance: float | Fraction, radius: float | Fraction) -> float:
    """Measure of (-r, r) meeting its translate at the given circle distance."""
    return max(0.0, float(2 * radius) - float(distance))


def _as_coords(system: RotationSystem, h: int | Sequence[int]) -> tuple[int, ...]:
    if isinstance(h, int):
        if system.rank != 1:
            raise ValueError(f"rank-{system.rank} system needs {system.rank} coordinates")
        return (h,)
    coords = tuple(int(v) for v in h)
    if len(coords) != system.rank:
        raise ValueError(f"expected {system.rank} coordinates, got {len(coords)}")
    return coords


def autocorr(system: RotationSystem, h: int | Sequence[int]) -> float:
    """Correlation of the window indicator with its translate by tau(h).

    Computed coordinate by coordinate as max(0, 2 r_i - dist_i) where dist_i
    is the circle distance of the i-th image coordinate from zero; exact up
    to the width of the surd bracket (about 2^-96 by default).
    """
    coords = _as_coords(system, h)
    value = 1.0
    for row, radius in zip(system.frequencies, system.radii):
        total = SurdNumber.zero()
        for f, c in zip(row, coords):
            if c:
                total = total + f.scaled(c)
        bits = DEFAULT_BITS
        while True:
            flo, fhi = fractional_interval(total, bits, MAX_BITS)
            dlo, dhi = circle_distance_interval(flo, fhi, Fraction(0))
            if dhi - dlo < Fraction(1, 1 << 64):
                break
            bits = min(2 * bits, MAX_BITS)
        dist = (dlo + dhi) / 2
        value *= interval_overlap(dist, radius)
        if value == 0.0:
            return 0.0
    return value


def _centered_box(rank: int, k: int) -> Iterable[tuple[int, ...]]:
    return itertools.product(range(-k, k + 1), repeat=rank)


def folner_average(system: RotationSystem, k: int, q: int = 1) -> float:
    """Box average of autocorr(q*h) over the centered box of radius k.

    For a totally ergodic rotation the limit is the squared window volume,
    independently of the stride q; cost is (2k+1)^rank evaluations.
    """
    if k < 1 or q < 1:
        raise ValueError("k and q must be positive")
    total = 0.0
    count = 0
    for h in _centered_box(system.rank, k):
        total += autocorr(system, tuple(q * v for v in h))
        count += 1
    return total / count


def atom_mass(
    system: RotationSystem,
    x0: Fraction | Sequence[Fraction],
    k: int,
) -> complex:
    """Character-twisted box average estimating the mass at a rational point.

    The twist conj(exp(2 pi i <x0, h>)) isolates the candidate atom at x0;
    at x0 = 0 this reduces to the plain correlation average.  Report the
    real part and modulus: both vanish (in the limit) at nonzero rationals.
    """
    if isinstance(x0, Fraction):
        point = (x0,)
    else:
        point = tuple(Fraction(v) for v in x0)
    if len(point) != system.rank:
        raise ValueError(f"expected {system.rank} coordinates for the rational point")
    if k < 1:
        raise ValueError("k must be positive")
    total = 0j
    count = 0
    for h in _centered_box(system.rank, k):
        phase = sum((x * v for x, v in zip(point, h)), start=Fraction(0)) % 1
        total += autocorr(system, h) * cmath.exp(-2j * cmath.pi * float(phase))
        count += 1
    return total / count


def character_average(
    frequency: Frequency | Sequence[Frequency],
    k: int,
) -> complex:
    """Average of a character over the one-sided box {1..k}^rank.

    Rejects the trivial character (the average would be identically 1).
    Rational coordinates of period q contribute exactly zero when q divides
    k, because whole periods cancel; otherwise the partial period is summed
    numerically.  The box average factors into per-coordinate averages.
    """
    if k < 1:
        raise ValueError("k must be positive")
    if isinstance(frequency, (Fraction, SurdNumber)):
        row: tuple[Frequency, ...] = (frequency,)
    else:
        row = tuple(frequency)
    normalized: list[Frequency] = []
    trivial = True
    for f in row:
        if isinstance(f, SurdNumber) and f.is_rational:
            f = f.rational_value()
        if isinstance(f, Fraction):
            f = f % 1
            if f != 0:
                trivial = False
        else:
            trivial = False
        normalized.append(f)
    if trivial:
        raise ValueError("trivial character: its average is identically 1")
    result = complex(1.0)
    for f in normalized:
        result *= _character_average_1d(f, k)
    return result


def _character_average_1d(f: Frequency, k: int) -> complex:
    if isinstance(f, Fraction):
        if f == 0:
            return complex(1.0)
        q = f.denominator
        r = k % q
        if r == 0:
            return 0j
        partial = sum(
            cmath.exp(2j * cmath.pi * float((f * g) % 1)) for g in range(1, r + 1)
        )
        return partial / k
    total = 0j
    for g in range(1, k + 1):
        lo, hi = fractional_interval(f.scaled(g))
        total += cmath.exp(2j * cmath.pi * float((lo + hi) / 2))
    return total / k
