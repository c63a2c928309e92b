"""Witness searches over conjugation orbits.

The searches enumerate the group ball by word length and test cheap window
membership of each conjugate, rather than enumerating the window set and
testing conjugacy (deciding integer conjugacy is hard; membership is a dot
product).  Scan order is word length first, then lexicographic word, so a
parallel run returns the same witness as a sequential one.  "Not found"
always means "not found within the stated bounds", never nonexistence.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Sequence

from .bohr import (
    AMBIENT_INTEGERS,
    BohrSpec,
    MembershipCheck,
    ThickMask,
    BoundaryUndecidable,
    iter_members,
    membership,
)
from .intmat import (
    IntPolynomial,
    Rows,
    TracelessIntMatrix,
    UnimodularMatrix,
    char_poly,
    conjugate,
    coords_of,
    mat_identity,
    mat_max_abs,
    mat_mul,
)

DEFAULT_ENTRY_BOUND = 10**12
DEFAULT_BALL_CAP = 5_000_000


class BallCapExceeded(RuntimeError):
    def __init__(self, size: int, cap: int):
        super().__init__(f"ball grew to {size} elements, above the cap of {cap}")
        self.size = size
        self.cap = cap


@dataclass(frozen=True)
class GroupBall:
    """Deduplicated word-length ball around the identity; not a subgroup."""

    generators: tuple[UnimodularMatrix, ...]
    radius: int
    elements: tuple[UnimodularMatrix, ...]
    words: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.elements)


def _bfs_levels(
    generators: Sequence[UnimodularMatrix],
    max_radius: int,
    cap: int,
) -> Iterator[list[tuple[Rows, Rows, tuple[int, ...]]]]:
    """Yield (element, inverse, word) triples level by level, in word order.

    Inverses ride along incrementally: (g s)^-1 = s^-1 g^-1, so no matrix
    ever needs to be inverted from scratch.
    """
    d = generators[0].d
    gen_pairs = [(g.entries, g.inverse().entries) for g in generators]
    ident = mat_identity(d)
    seen = {ident}
    level: list[tuple[Rows, Rows, tuple[int, ...]]] = [(ident, ident, ())]
    yield level
    for _ in range(max_radius):
        nxt: list[tuple[Rows, Rows, tuple[int, ...]]] = []
        for rows, inv, word in level:
            for gi, (grow, ginv) in enumerate(gen_pairs):
                cand = mat_mul(rows, grow)
                if cand in seen:
                    continue
                seen.add(cand)
                if len(seen) > cap:
                    raise BallCapExceeded(len(seen), cap)
                nxt.append((cand, mat_mul(ginv, inv), word + (gi,)))
        if not nxt:
            return
        level = nxt
        yield level


def ball(
    generators: Sequence[UnimodularMatrix],
    radius: int,
    cap: int = DEFAULT_BALL_CAP,
) -> GroupBall:
    """All elements of word length at most radius, breadth-first, no duplicates."""
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    elements: list[UnimodularMatrix] = []
    words: list[tuple[int, ...]] = []
    for level in _bfs_levels(generators, radius, cap):
        for rows, _, word in level:
            elements.append(UnimodularMatrix.from_rows(rows))
            words.append(word)
    return GroupBall(
        generators=tuple(generators),
        radius=radius,
        elements=tuple(elements),
        words=tuple(words),
    )


@dataclass(frozen=True)
class Witness:
    """A conjugating element g and the set member it produces.

    member equals g * target * g^-1 and conjugating member back by g recovers
    the target exactly; check carries the window image and margins.
    """

    g: UnimodularMatrix
    member: TracelessIntMatrix
    target: TracelessIntMatrix
    word: tuple[int, ...]
    check: MembershipCheck

    @property
    def word_length(self) -> int:
        return len(self.word)

    def to_json(self) -> dict:
        return {
            "g": self.g.to_lists(),
            "member": self.member.to_lists(),
            "target": self.target.to_lists(),
            "word": list(self.word),
            "word_length": self.word_length,
            "tau": list(self.check.tau),
            "margins": list(self.check.margins),
        }


@dataclass(frozen=True)
class ConjugacySearchResult:
    witness: Witness | None
    radius_searched: int
    tested: int
    skipped_boundary: int
    skipped_entry_bound: int

    @property
    def found(self) -> bool:
        return self.witness is not None


def _membership_chunk(
    payload: tuple[BohrSpec, ThickMask | None, list[tuple[int, Rows]]],
) -> tuple[int | None, int]:
    """Scan one chunk of candidate matrices; return (earliest hit index, boundary skips)."""
    spec, mask, items = payload
    skipped = 0
    for idx, rows in items:
        try:
            if membership(spec, TracelessIntMatrix.from_rows(rows), mask).member:
                return idx, skipped
        except BoundaryUndecidable:
            skipped += 1
    return None, skipped


def find_conjugate_in_bohr(
    target: TracelessIntMatrix,
    spec: BohrSpec,
    mask: ThickMask | None = None,
    max_radius: int = 12,
    *,
    generators: Sequence[UnimodularMatrix] | None = None,
    entry_bound: int = DEFAULT_ENTRY_BOUND,
    workers: int = 1,
    ball_cap: int = DEFAULT_BALL_CAP,
) -> ConjugacySearchResult:
    """Search the conjugation orbit of target for a member of the set.

    Scans g over the word-length ball in breadth-first order, forms
    g * target * g^-1, and returns the first conjugate inside the window.
    Conjugates whose entries exceed entry_bound are skipped without testing
    (raising the bound restores completeness); boundary-undecidable
    conjugates are skipped and counted.  The returned witness re-verifies
    g^-1 * member * g == target by exact multiplication before returning.
    """
    if not spec.zero_centered:
        raise ValueError("witness search requires a zero-centered window")
    from .intmat import elementary_generators

    gens = tuple(generators) if generators is not None else tuple(
        elementary_generators(target.d)
    )
    tested = 0
    skipped_boundary = 0
    skipped_entry = 0
    seen_conjugates: set[Rows] = set()
    c_rows = target.entries
    radius = -1
    for level in _bfs_levels(gens, max_radius, ball_cap):
        radius += 1
        candidates: list[tuple[int, Rows, Rows, tuple[int, ...]]] = []
        for rows, inv, word in level:
            a_rows = mat_mul(mat_mul(rows, c_rows), inv)
            if a_rows in seen_conjugates:
                continue
            seen_conjugates.add(a_rows)
            if mat_max_abs(a_rows) > entry_bound:
                skipped_entry += 1
                continue
            candidates.append((len(candidates), a_rows, rows, word))
        hit_pos: int | None = None
        if workers <= 1 or len(candidates) < 64:
            for pos, a_rows, _, _ in candidates:
                tested += 1
                try:
                    if membership(spec, TracelessIntMatrix.from_rows(a_rows), mask).member:
                        hit_pos = pos
                        break
                except BoundaryUndecidable:
                    skipped_boundary += 1
        else:
            chunks = _chunked([(pos, a) for pos, a, _, _ in candidates], workers)
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results = list(
                    pool.map(_membership_chunk, [(spec, mask, ch) for ch in chunks])
                )
            tested += len(candidates)
            hits = [pos for pos, _ in results if pos is not None]
            skipped_boundary += sum(s for _, s in results)
            hit_pos = min(hits) if hits else None
        if hit_pos is not None:
            _, a_rows, g_rows, word = candidates[hit_pos]
            g = UnimodularMatrix.from_rows(g_rows)
            member = TracelessIntMatrix.from_rows(a_rows)
            if conjugate(g, member).entries != target.entries:
                raise RuntimeError("witness failed exact re-verification")
            check = membership(spec, member, mask)
            witness = Witness(g=g, member=member, target=target, word=word, check=check)
            return ConjugacySearchResult(
                witness=witness,
                radius_searched=radius,
                tested=tested,
                skipped_boundary=skipped_boundary,
                skipped_entry_bound=skipped_entry,
            )
    return ConjugacySearchResult(
        witness=None,
        radius_searched=max_radius,
        tested=tested,
        skipped_boundary=skipped_boundary,
        skipped_entry_bound=skipped_entry,
    )


def _chunked(items: list, parts: int) -> list[list]:
    size = max(1, math.ceil(len(items) / parts))
    return [items[i : i + size] for i in range(0, len(items), size)]


def traceless_companion(p: IntPolynomial) -> TracelessIntMatrix:
    """Companion-style realization of a monic polynomial with zero subleading term.

    Superdiagonal ones with the negated coefficients along the bottom row;
    the trace is minus the subleading coefficient, so only polynomials with
    that coefficient zero land in the traceless lattice.
    """
    d = p.degree
    if d < 2:
        raise ValueError("need degree at least 2")
    coeffs = p.coefficients
    if coeffs[d - 1] != 0:
        raise ValueError(
            "polynomial has a nonzero subleading coefficient and cannot be "
            "realized by a traceless matrix"
        )
    rows = [[0] * d for _ in range(d)]
    for i in range(d - 1):
        rows[i][i + 1] = 1
    for j in range(d):
        rows[d - 1][j] = -coeffs[j]
    return TracelessIntMatrix.from_rows(rows)


def charpoly_witness(
    p_or_matrix: IntPolynomial | TracelessIntMatrix,
    spec: BohrSpec,
    mask: ThickMask | None = None,
    max_radius: int = 12,
    **kwargs,
) -> ConjugacySearchResult:
    """Find a set member with the requested characteristic polynomial.

    A given matrix is used as-is; a polynomial is realized by its traceless
    companion matrix first.  Conjugation preserves the characteristic
    polynomial, so any witness for the realization answers the question;
    the returned member is re-checked against the polynomial exactly.
    """
    if isinstance(p_or_matrix, TracelessIntMatrix):
        target = p_or_matrix
        poly = char_poly(target)
    else:
        poly = p_or_matrix
        target = traceless_companion(poly)
    result = find_conjugate_in_bohr(target, spec, mask, max_radius, **kwargs)
    if result.witness is not None:
        if char_poly(result.witness.member).coefficients != poly.coefficients:
            raise RuntimeError("witness characteristic polynomial mismatch")
    return result


@dataclass(frozen=True)
class CoverageEntry:
    t: int
    found: bool
    x: int | None
    y: int | None
    z: int | None
    via: str  # "zero-shortcut", "search", or "none"


@dataclass(frozen=True)
class CoverageReport:
    entries: tuple[CoverageEntry, ...]
    box_radius: int
    members_found: int
    members_undecided: int

    @property
    def found_fraction(self) -> float:
        hits = sum(1 for e in self.entries if e.found)
        return hits / len(self.entries)


def discriminant_cover(
    spec: BohrSpec,
    mask: ThickMask | None = None,
    box_radius: int = 100_000,
    t_values: Sequence[int] = tuple(range(-50, 51)),
    *,
    x_bound: int = 5_000,
    filter_primes: Sequence[int] = (241, 251, 257),
) -> CoverageReport:
    """Search for triples (x, y, z) in the set with x*y - z*z = t, per target t.

    Member zero gives every t = -z*z for free via (0, 0, z).  The general
    search runs z-major over members by increasing size; each candidate
    u = t + z*z passes residue filters (u mod p must be a product of two
    member residues mod p) before divisor pairs x | u with y = u/x are tried
    among the members.  Witnesses are re-verified exactly; a miss is
    reported as "not found within the box", never as nonexistence.
    """
    if spec.ambient != AMBIENT_INTEGERS:
        raise ValueError("discriminant coverage runs over the integer ambient")
    undecided: list = []
    members = sorted(
        iter_members(spec, box_radius, mask, undecided=undecided), key=abs
    )
    member_set = set(members)
    small_x = [x for x in members if x != 0 and abs(x) <= x_bound]
    product_residues: dict[int, set[int]] = {}
    for prime in filter_primes:
        residues = {m % prime for m in member_set}
        product_residues[prime] = {(a * b) % prime for a in residues for b in residues}

    entries: list[CoverageEntry] = []
    for t in t_values:
        entry = _cover_one(
            t, members, member_set, small_x, product_residues, box_radius
        )
        entries.append(entry)
    return CoverageReport(
        entries=tuple(entries),
        box_radius=box_radius,
        members_found=len(members),
        members_undecided=len(undecided),
    )


def _cover_one(
    t: int,
    members: list[int],
    member_set: set[int],
    small_x: list[int],
    product_residues: dict[int, set[int]],
    box_radius: int,
) -> CoverageEntry:
    if t <= 0:
        z = math.isqrt(-t)
        if z * z == -t and z in member_set:
            return CoverageEntry(t=t, found=True, x=0, y=0, z=z, via="zero-shortcut")
    for z in members:
        u = t + z * z
        if u == 0:
            return CoverageEntry(t=t, found=True, x=0, y=0, z=z, via="search")
        skip = False
        for prime, allowed in product_residues.items():
            if (u % prime) not in allowed:
                skip = True
                break
        if skip:
            continue
        for x in small_x:
            if u % x == 0:
                y = u // x
                if abs(y) <= box_radius and y in member_set:
                    if x * y - z * z != t:
                        raise RuntimeError("coverage witness failed verification")
                    return CoverageEntry(t=t, found=True, x=x, y=y, z=z, via="search")
    return CoverageEntry(t=t, found=False, x=None, y=None, z=None, via="none")
