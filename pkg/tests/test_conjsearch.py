import random
from fractions import Fraction

import pytest

from bohrwalk.bohr import AMBIENT_INTEGERS, AMBIENT_MATRICES, BohrSpec, ThickMask
from bohrwalk.conjsearch import (
    BallCapExceeded,
    ball,
    charpoly_witness,
    discriminant_cover,
    find_conjugate_in_bohr,
    traceless_companion,
)
from bohrwalk.intmat import (
    IntPolynomial,
    TracelessIntMatrix,
    UnimodularMatrix,
    char_poly,
    conjugate,
    coords_of,
    elementary_generators,
)
from bohrwalk.surd import parse_surd
from helpers import make_traceless


def witness_spec(radius=Fraction(1, 20)) -> BohrSpec:
    return BohrSpec(
        ambient=AMBIENT_MATRICES,
        d=2,
        frequencies=((parse_surd("sqrt2"), parse_surd("sqrt3"), parse_surd("sqrt5")),),
        window=((Fraction(0), radius),),
    )


def z_spec(radius=Fraction(1, 10)) -> BohrSpec:
    return BohrSpec(
        ambient=AMBIENT_INTEGERS,
        d=None,
        frequencies=((parse_surd("sqrt2"),),),
        window=((Fraction(0), radius),),
    )


# --- oracle: plain set-based breadth-first closure, no dedup tricks

def bfs_ball_oracle(generators, radius):
    frontier = {UnimodularMatrix.identity(generators[0].d).entries}
    seen = set(frontier)
    for _ in range(radius):
        nxt = set()
        for rows in frontier:
            g = UnimodularMatrix.from_rows(rows)
            for s in generators:
                out = (g * s).entries
                if out not in seen:
                    nxt.add(out)
        seen |= nxt
        frontier = nxt
    return seen


def test_ball_sizes_small_radii():
    gens = elementary_generators(2)
    assert len(ball(gens, 0)) == 1
    assert len(ball(gens, 1)) == 5
    assert len(ball(gens, 2)) == 17


def test_ball_matches_bfs_oracle():
    gens = elementary_generators(2)
    for radius in (1, 2, 3):
        got = {g.entries for g in ball(gens, radius).elements}
        assert got == bfs_ball_oracle(gens, radius)


def test_ball_contains_identity_and_grows_strictly():
    gens = elementary_generators(2)
    sizes = [len(ball(gens, radius)) for radius in range(7)]
    ident = UnimodularMatrix.identity(2).entries
    assert all(b > a for a, b in zip(sizes, sizes[1:]))
    assert ball(gens, 3).elements[0].entries == ident


def test_ball_nesting():
    gens = elementary_generators(2)
    small = {g.entries for g in ball(gens, 3).elements}
    large = {g.entries for g in ball(gens, 4).elements}
    assert small <= large


def test_ball_words_reproduce_elements():
    gens = elementary_generators(2)
    b = ball(gens, 3)
    for element, word in zip(b.elements, b.words):
        acc = UnimodularMatrix.identity(2)
        for i in word:
            acc = acc * gens[i]
        assert acc == element
        assert len(word) <= 3


def test_ball_cap_enforced():
    gens = elementary_generators(2)
    with pytest.raises(BallCapExceeded):
        ball(gens, 6, cap=50)


# --- conjugacy witness search

def test_target_already_inside_returns_identity():
    spec = witness_spec(radius=Fraction(1, 4))
    target = TracelessIntMatrix.zero(2)
    result = find_conjugate_in_bohr(target, spec, max_radius=3)
    assert result.found
    assert result.witness.g == UnimodularMatrix.identity(2)
    assert result.witness.member == target
    assert result.witness.word == ()


def test_zero_matrix_witnessed_by_identity():
    result = find_conjugate_in_bohr(TracelessIntMatrix.zero(2), witness_spec(), max_radius=1)
    assert result.found and result.witness.word_length == 0


def test_witness_search_finds_and_reverifies():
    target = TracelessIntMatrix.from_rows([[1, 2], [3, -1]])
    result = find_conjugate_in_bohr(target, witness_spec(), max_radius=12)
    assert result.found
    w = result.witness
    assert conjugate(w.g, w.member).entries == target.entries
    assert w.check.member and min(w.check.margins) > 0
    assert char_poly(w.member) == char_poly(target)


def test_witness_deterministic_and_worker_invariant():
    target = TracelessIntMatrix.from_rows([[0, 3], [2, 0]])
    first = find_conjugate_in_bohr(target, witness_spec(), max_radius=10)
    second = find_conjugate_in_bohr(target, witness_spec(), max_radius=10)
    parallel = find_conjugate_in_bohr(target, witness_spec(), max_radius=10, workers=2)
    assert first.found
    assert first.witness.g == second.witness.g == parallel.witness.g
    assert first.witness.word == parallel.witness.word


def test_witness_not_found_reports_bounds():
    target = TracelessIntMatrix.from_rows([[1, 2], [3, -1]])
    result = find_conjugate_in_bohr(target, witness_spec(Fraction(1, 10**9)), max_radius=2)
    assert not result.found
    assert result.radius_searched == 2
    assert result.tested > 0


def test_witness_requires_zero_center():
    spec = BohrSpec(
        ambient=AMBIENT_MATRICES,
        d=2,
        frequencies=witness_spec().frequencies,
        window=((Fraction(1, 8), Fraction(1, 20)),),
    )
    with pytest.raises(ValueError):
        find_conjugate_in_bohr(TracelessIntMatrix.zero(2), spec)


def test_entry_bound_skips_are_counted():
    target = TracelessIntMatrix.from_rows([[9, 40], [41, -9]])
    result = find_conjugate_in_bohr(
        target, witness_spec(Fraction(1, 10**6)), max_radius=4, entry_bound=50
    )
    assert result.skipped_entry_bound > 0


def test_conjugates_preserve_char_poly_along_scan():
    rng = random.Random(66)
    target = make_traceless(2, 4, rng)
    gens = elementary_generators(2)
    for g in ball(gens, 3).elements:
        moved = conjugate(g.inverse(), target)  # g * target * g^-1
        assert char_poly(moved) == char_poly(target)


# --- characteristic polynomial witnesses

def test_traceless_companion_shape():
    c = traceless_companion(IntPolynomial((0, 0, 1)))
    assert c.entries == ((0, 1), (0, 0))
    with pytest.raises(ValueError):
        traceless_companion(IntPolynomial((3, 1, 1)))  # nonzero subleading term
    with pytest.raises(ValueError):
        traceless_companion(IntPolynomial((0, 1)))


def test_charpoly_witness_from_polynomial():
    result = charpoly_witness(IntPolynomial((0, 0, 1)), witness_spec(), max_radius=10)
    assert result.found
    member = result.witness.member
    assert char_poly(member).to_list() == [0, 0, 1]


def test_charpoly_witness_from_matrix_reuses_search():
    target = TracelessIntMatrix.from_rows([[1, 2], [3, -1]])
    viaconj = find_conjugate_in_bohr(target, witness_spec(), max_radius=12)
    viapoly = charpoly_witness(target, witness_spec(), max_radius=12)
    assert viapoly.found
    assert viapoly.witness.g == viaconj.witness.g


def test_charpoly_2x2_closed_form_on_witness():
    target = TracelessIntMatrix.from_rows([[2, 5], [1, -2]])
    result = charpoly_witness(target, witness_spec(), max_radius=12)
    assert result.found
    x, y = result.witness.member.entries[0]
    z = result.witness.member.entries[1][0]
    assert char_poly(result.witness.member).to_list() == [-(x * x + y * z), 0, 1]


# --- discriminant coverage

def test_zero_target_uses_zero_shortcut():
    report = discriminant_cover(z_spec(), box_radius=200, t_values=(0,))
    entry = report.entries[0]
    assert entry.found and entry.via == "zero-shortcut"
    assert (entry.x, entry.y, entry.z) == (0, 0, 0)


def test_negative_squares_of_members_short_circuit():
    report = discriminant_cover(z_spec(), box_radius=200, t_values=(-25,))
    entry = report.entries[0]
    assert entry.found and entry.via == "zero-shortcut" and entry.z == 5


def test_small_coverage_all_verified_and_symmetric():
    report = discriminant_cover(z_spec(), box_radius=3000, t_values=tuple(range(-10, 11)))
    member_set = None
    for entry in report.entries:
        assert entry.found
        if entry.via == "search":
            assert entry.x * entry.y - entry.z * entry.z == entry.t
            # swapping the product pair is again a witness
            assert entry.y * entry.x - entry.z * entry.z == entry.t
    assert report.found_fraction == 1.0


def test_coverage_never_claims_nonexistence():
    report = discriminant_cover(
        z_spec(Fraction(1, 100)), box_radius=50, t_values=(7,)
    )
    entry = report.entries[0]
    assert not entry.found and entry.via == "none"
    assert report.box_radius == 50


def test_coverage_respects_mask():
    mask = ThickMask((((1, 10**6),),))  # strip out every positive member
    report = discriminant_cover(z_spec(), mask, box_radius=500, t_values=(1,))
    for entry in report.entries:
        if entry.found and entry.via == "search":
            assert entry.x <= 0 and entry.y <= 0 and entry.z <= 0


def test_coverage_requires_integer_ambient():
    with pytest.raises(ValueError):
        discriminant_cover(witness_spec(), box_radius=10, t_values=(0,))
