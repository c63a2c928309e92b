"""Bohr-type subsets of the traceless matrix lattice and of the integers.

A descriptor holds a homomorphism into T^n (rows of exact surd frequencies,
one column per ambient coordinate) together with an open window around each
target coordinate; the set consists of the ambient elements whose image
lands in the window.  Membership is decided with interval arithmetic that
widens its precision until the point provably lies inside or outside;
elements too close to the window boundary raise BoundaryUndecidable instead
of being silently rounded.

Density of the homomorphism image (the non-periodicity hypothesis) is not
decidable from numerics, so validation demands at least one irrational-
tagged frequency per row and the emitted JSON records that rational
independence of the chosen surds is assumed, not proven.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

from .intmat import CoordVector, TracelessIntMatrix, coord_rank, coords_of, coords_to
from .surd import (
    DEFAULT_BITS,
    MAX_BITS,
    BoundaryUndecidable,
    SurdNumber,
    circle_distance_interval,
    fractional_interval,
)

AMBIENT_INTEGERS = "integers"
AMBIENT_MATRICES = "matrices"

_QUARTER = Fraction(1, 4)


class SpecValidationError(ValueError):
    """The descriptor violates a structural requirement."""


AmbientElement = int | CoordVector | TracelessIntMatrix


@dataclass(frozen=True)
class ThickMask:
    """Finite list of excluded coordinate boxes; the complement has density one.

    A desk-scale stand-in for a thick set: true thick sets are infinite
    unions, here only finitely many boxes are ever carved out.
    """

    excluded: tuple[tuple[tuple[int, int], ...], ...]

    def __post_init__(self) -> None:
        boxes = tuple(
            tuple((int(lo), int(hi)) for lo, hi in box) for box in self.excluded
        )
        for box in boxes:
            for lo, hi in box:
                if lo > hi:
                    raise SpecValidationError(f"empty box bound ({lo}, {hi})")
        object.__setattr__(self, "excluded", boxes)

    def excludes(self, coords: tuple[int, ...]) -> bool:
        for box in self.excluded:
            if len(box) != len(coords):
                raise ValueError("mask box rank does not match ambient rank")
            if all(lo <= v <= hi for (lo, hi), v in zip(box, coords)):
                return True
        return False

    def to_json(self) -> list:
        return [[[lo, hi] for lo, hi in box] for box in self.excluded]

    @classmethod
    def from_json(cls, doc: Sequence) -> "ThickMask":
        return cls(tuple(tuple((int(lo), int(hi)) for lo, hi in box) for box in doc))


@dataclass(frozen=True)
class BohrSpec:
    """Frequency rows, one per torus coordinate, plus an open window.

    ambient is "integers" (rank 1) or "matrices" (rank d*d-1); the window is
    a product of open intervals (center - radius, center + radius) with
    radii capped at 1/4 so the halved sub-window still avoids wraparound in
    downstream overlap formulas.
    """

    ambient: str
    d: int | None
    frequencies: tuple[tuple[SurdNumber, ...], ...]
    window: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self) -> None:
        if self.ambient not in (AMBIENT_INTEGERS, AMBIENT_MATRICES):
            raise SpecValidationError(f"unknown ambient {self.ambient!r}")
        if self.ambient == AMBIENT_MATRICES:
            if self.d is None or self.d < 2:
                raise SpecValidationError("matrix ambient needs d >= 2")
        rank = self.rank
        freq = tuple(tuple(row) for row in self.frequencies)
        if not freq:
            raise SpecValidationError("at least one frequency row is required")
        for i, row in enumerate(freq):
            if len(row) != rank:
                raise SpecValidationError(
                    f"frequency row {i} has {len(row)} entries, expected {rank}"
                )
            if all(entry.is_rational for entry in row):
                raise SpecValidationError(
                    f"frequency row {i} is rational-only; a dense image needs an "
                    "irrational-tagged entry"
                )
        window = tuple(
            (Fraction(c), Fraction(r)) for c, r in self.window
        )
        if len(window) != len(freq):
            raise SpecValidationError("window must have one interval per frequency row")
        for i, (_, radius) in enumerate(window):
            if not 0 < radius <= _QUARTER:
                raise SpecValidationError(
                    f"window radius {radius} at row {i} must lie in (0, 1/4]"
                )
        object.__setattr__(self, "frequencies", freq)
        object.__setattr__(self, "window", window)

    @property
    def rank(self) -> int:
        return 1 if self.ambient == AMBIENT_INTEGERS else coord_rank(self.d)  # type: ignore[arg-type]

    @property
    def n(self) -> int:
        return len(self.frequencies)

    @property
    def zero_centered(self) -> bool:
        return all(c == 0 for c, _ in self.window)

    def to_json(self) -> dict:
        return {
            "ambient": self.ambient,
            "d": self.d,
            "n": self.n,
            "frequencies": [[f.to_json() for f in row] for row in self.frequencies],
            "window": [{"center": str(c), "radius": str(r)} for c, r in self.window],
            "independence_assumed": True,
        }


@dataclass(frozen=True)
class MembershipCheck:
    """Outcome of one membership decision, kept for witness records."""

    member: bool
    tau: tuple[float, ...]
    margins: tuple[float, ...]
    excluded_by_mask: bool = False


def as_coords(spec: BohrSpec, h: AmbientElement) -> tuple[int, ...]:
    if spec.ambient == AMBIENT_INTEGERS:
        if not isinstance(h, int):
            raise TypeError(f"integer ambient expects int elements, got {type(h).__name__}")
        return (h,)
    if isinstance(h, TracelessIntMatrix):
        return coords_of(h).coords
    if isinstance(h, CoordVector):
        return h.coords
    raise TypeError(f"matrix ambient expects a traceless matrix or coordinates, got {type(h).__name__}")


def _row_value(row: tuple[SurdNumber, ...], coords: tuple[int, ...]) -> SurdNumber:
    total = SurdNumber.zero()
    for f, c in zip(row, coords):
        if c:
            total = total + f.scaled(c)
    return total


def tau(
    spec: BohrSpec,
    h: AmbientElement,
    bits: int = DEFAULT_BITS,
    max_bits: int = MAX_BITS,
) -> tuple[float, ...]:
    """Image of h on T^n as floats; the exact bracket width is about 2^-bits."""
    coords = as_coords(spec, h)
    out = []
    for row in spec.frequencies:
        lo, hi = fractional_interval(_row_value(row, coords), bits, max_bits)
        out.append(float((lo + hi) / 2))
    return tuple(out)


def membership(
    spec: BohrSpec,
    h: AmbientElement,
    mask: ThickMask | None = None,
    *,
    bits: int = DEFAULT_BITS,
    max_bits: int = MAX_BITS,
) -> MembershipCheck:
    """Decide h in the set, escalating precision until every row is resolved.

    The window is open, so exact boundary hits count as outside.  Margins
    are the certified distances from the decision boundary, one per row.
    """
    coords = as_coords(spec, h)
    if mask is not None and mask.excludes(coords):
        return MembershipCheck(
            member=False,
            tau=tau(spec, h, bits, max_bits),
            margins=(),
            excluded_by_mask=True,
        )
    taus: list[float] = []
    margins: list[float] = []
    member = True
    for row, (center, radius) in zip(spec.frequencies, spec.window):
        value = _row_value(row, coords)
        level = bits
        while True:
            flo, fhi = fractional_interval(value, level, max_bits)
            dlo, dhi = circle_distance_interval(flo, fhi, center)
            if dhi < radius:
                taus.append(float((flo + fhi) / 2))
                margins.append(float(radius - dhi))
                break
            if dlo >= radius:
                taus.append(float((flo + fhi) / 2))
                margins.append(float(dlo - radius))
                member = False
                break
            if level >= max_bits:
                raise BoundaryUndecidable(
                    f"element {h!r} sits within {float(dhi - dlo):.3e} of the window "
                    f"boundary at {max_bits} bits",
                    h,
                )
            level = min(2 * level, max_bits)
        if not member:
            break
    return MembershipCheck(member=member, tau=tuple(taus), margins=tuple(margins))


def contains(spec: BohrSpec, h: AmbientElement, mask: ThickMask | None = None) -> bool:
    """True iff the image of h lies in the window and h avoids the mask."""
    return membership(spec, h, mask).member


def iter_members(
    spec: BohrSpec,
    box_radius: int,
    mask: ThickMask | None = None,
    *,
    undecided: list | None = None,
) -> Iterator[AmbientElement]:
    """Stream members with sup-norm at most box_radius, in scan order.

    Boundary-undecidable elements are skipped; pass a list to collect them.
    """
    if box_radius < 0:
        raise ValueError("box radius must be nonnegative")
    for coords in _box_iter(spec.rank, box_radius):
        element: AmbientElement
        if spec.ambient == AMBIENT_INTEGERS:
            element = coords[0]
        else:
            element = coords_to(CoordVector(spec.d, coords))  # type: ignore[arg-type]
        try:
            if membership(spec, element, mask).member:
                yield element
        except BoundaryUndecidable:
            if undecided is not None:
                undecided.append(element)


def _box_iter(rank: int, radius: int) -> Iterator[tuple[int, ...]]:
    if rank == 1:
        for h in range(-radius, radius + 1):
            yield (h,)
    else:
        yield from itertools.product(range(-radius, radius + 1), repeat=rank)


@dataclass(frozen=True)
class EnumerationResult:
    members: tuple[AmbientElement, ...]
    undecided: tuple[AmbientElement, ...]
    scanned: int


def enumerate_box(
    spec: BohrSpec, box_radius: int, mask: ThickMask | None = None
) -> EnumerationResult:
    """Materialized list of members within the box, plus the undecided ones."""
    undecided: list[AmbientElement] = []
    members = tuple(iter_members(spec, box_radius, mask, undecided=undecided))
    scanned = (2 * box_radius + 1) ** spec.rank
    return EnumerationResult(members, tuple(undecided), scanned)


def zero_symmetric_sub(spec: BohrSpec) -> BohrSpec:
    """Halve the window radii of a zero-centered descriptor.

    Two members of the result differ by an element of the original set: each
    image coordinate is within half the radius of zero, so the difference is
    within the full radius by the triangle inequality on the circle.
    """
    if not spec.zero_centered:
        raise SpecValidationError("difference construction needs a zero-centered window")
    return BohrSpec(
        ambient=spec.ambient,
        d=spec.d,
        frequencies=spec.frequencies,
        window=tuple((c, r / 2) for c, r in spec.window),
    )


def bohr_document(spec: BohrSpec, mask: ThickMask | None = None) -> dict:
    doc = spec.to_json()
    doc["mask"] = mask.to_json() if mask is not None else []
    return doc


def load_bohr_document(doc: dict) -> tuple[BohrSpec, ThickMask | None]:
    """Parse the JSON descriptor; frequencies accept surd strings or term lists."""
    freq = tuple(
        tuple(SurdNumber.from_json(entry) for entry in row)
        for row in doc["frequencies"]
    )
    window = tuple(
        (Fraction(w["center"]), Fraction(w["radius"])) for w in doc["window"]
    )
    spec = BohrSpec(
        ambient=doc["ambient"],
        d=doc.get("d"),
        frequencies=freq,
        window=window,
    )
    mask_doc = doc.get("mask") or []
    mask = ThickMask.from_json(mask_doc) if mask_doc else None
    return spec, mask
