import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bohrwalk.intmat import (
    AdjointOperator,
    CoordVector,
    IntPolynomial,
    SquareIntMatrix,
    TracelessIntMatrix,
    UnimodularMatrix,
    adjoint_matrix,
    char_poly,
    conjugate,
    coord_rank,
    coords_of,
    coords_to,
    det_exact,
    elementary_generators,
    proximal_element,
)
from helpers import make_traceless, make_unimodular


# --- independent oracle: det(lambda I - M) by Leibniz expansion over
#     polynomial entries; no shared code with the implementation under test.

def _poly_add(a, b):
    n = max(len(a), len(b))
    return [
        (a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)
    ]


def _poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _perm_sign(perm):
    sign = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


def char_poly_oracle(rows):
    n = len(rows)
    total = [0] * (n + 1)
    for perm in itertools.permutations(range(n)):
        term = [1]
        for i in range(n):
            j = perm[i]
            entry = [-rows[i][j], 1] if i == j else [-rows[i][j]]
            term = _poly_mul(term, entry)
        total = _poly_add(total, [_perm_sign(perm) * c for c in term])
    return total


def det_oracle(rows):
    n = len(rows)
    return sum(
        _perm_sign(p) *_prod(rows[i][p[i]] for i in range(n))
        for p in itertools.permutations(range(n))
    )


def _prod(values):
    out = 1
    for v in values:
        out *= v
    return out


# --- coordinates

def test_coords_of_matches_footnote_ordering():
    a = TracelessIntMatrix.from_rows([[1, 2], [3, -1]])
    assert coords_of(a).coords == (1, 2, 3)


def test_coords_of_zero():
    assert coords_of(TracelessIntMatrix.zero(3)).coords == (0,) * 8


def test_coords_of_unrolls_row_major_for_d3():
    rows = [[1, 2, 3], [4, 5, 6], [7, 8, -6]]
    assert coords_of(TracelessIntMatrix.from_rows(rows)).coords == (1, 2, 3, 4, 5, 6, 7, 8)


def test_coords_to_examples():
    assert coords_to(CoordVector(2, (1, 2, 3))).entries == ((1, 2), (3, -1))
    assert coords_to(CoordVector(2, (0, 0, 0))).entries == ((0, 0), (0, 0))


def test_coords_roundtrip_random():
    rng = random.Random(7)
    for _ in range(100):
        d = rng.choice([2, 3, 4])
        v = CoordVector(d, tuple(rng.randint(-50, 50) for _ in range(coord_rank(d))))
        assert coords_of(coords_to(v)) == v


@given(st.lists(st.integers(-10**6, 10**6), min_size=8, max_size=8))
def test_coords_roundtrip_property(coords):
    v = CoordVector(3, tuple(coords))
    assert coords_of(coords_to(v)) == v


def test_coord_vector_length_mismatch():
    with pytest.raises(ValueError):
        CoordVector(2, (1, 2))


# --- conjugation

def test_conjugate_by_identity():
    rng = random.Random(1)
    a = make_traceless(3, 5, rng)
    assert conjugate(UnimodularMatrix.identity(3), a).entries == a.entries


def test_conjugate_transvection_closed_form():
    g = UnimodularMatrix.from_rows([[1, 1], [0, 1]])
    rng = random.Random(2)
    for _ in range(25):
        x, y, z = (rng.randint(-9, 9) for _ in range(3))
        a = TracelessIntMatrix.from_rows([[x, y], [z, -x]])
        expected = ((x - z, 2 * x + y - z), (z, z - x))
        assert conjugate(g, a).entries == expected


def test_conjugate_preserves_char_poly():
    rng = random.Random(3)
    for _ in range(100):
        d = rng.choice([2, 3])
        g = make_unimodular(d, rng.randint(0, 6), rng)
        a = make_traceless(d, 10, rng)
        assert char_poly(conjugate(g, a)) == char_poly(a)
        assert conjugate(g, a).inner.trace == 0


def test_conjugate_dimension_mismatch():
    with pytest.raises(ValueError):
        conjugate(UnimodularMatrix.identity(2), TracelessIntMatrix.zero(3))


# --- the conjugation operator in coordinates

def test_adjoint_of_identity():
    ad = adjoint_matrix(UnimodularMatrix.identity(2))
    assert ad.matrix == ((1, 0, 0), (0, 1, 0), (0, 0, 1))


def test_adjoint_of_corner_block():
    ad = adjoint_matrix(proximal_element(2))
    assert ad.to_lists() == [[3, -2, 1], [-4, 4, -1], [2, -1, 1]]


def test_adjoint_of_transvection():
    ad = adjoint_matrix(UnimodularMatrix.from_rows([[1, 1], [0, 1]]))
    assert ad.to_lists() == [[1, 0, -1], [2, 1, -1], [0, 0, 1]]


def test_adjoint_consistent_with_conjugate():
    rng = random.Random(4)
    for _ in range(50):
        d = rng.choice([2, 3])
        g = make_unimodular(d, rng.randint(0, 5), rng)
        h = make_traceless(d, 8, rng)
        ad = adjoint_matrix(g)
        image = coords_of(conjugate(g, h)).coords
        applied = tuple(
            sum(ad.matrix[i][j] * coords_of(h).coords[j] for j in range(coord_rank(d)))
            for i in range(coord_rank(d))
        )
        assert image == applied


@settings(max_examples=40, deadline=None)
@given(
    st.integers(2, 3),
    st.lists(st.integers(0, 11), max_size=4),
    st.lists(st.integers(0, 11), max_size=4),
)
def test_adjoint_antihomomorphism(d, word1, word2):
    gens = elementary_generators(d)
    g1 = UnimodularMatrix.identity(d)
    for i in word1:
        g1 = g1 * gens[i % len(gens)]
    g2 = UnimodularMatrix.identity(d)
    for i in word2:
        g2 = g2 * gens[i % len(gens)]
    lhs = adjoint_matrix(g1 * g2).matrix
    from bohrwalk.intmat import mat_mul

    rhs = mat_mul(adjoint_matrix(g2).matrix, adjoint_matrix(g1).matrix)
    assert lhs == rhs


def test_adjoint_determinant_one_on_ball_elements():
    rng = random.Random(5)
    for _ in range(100):
        d = rng.choice([2, 3])
        g = make_unimodular(d, rng.randint(0, 7), rng)
        assert det_exact(adjoint_matrix(g).matrix) == 1


def test_adjoint_operator_rejects_wrong_determinant():
    with pytest.raises(ValueError):
        AdjointOperator(2, ((2, 0, 0), (0, 1, 0), (0, 0, 1)))


# --- characteristic polynomials

def test_char_poly_identity_3x3():
    assert char_poly(SquareIntMatrix.identity(3)).to_list() == [-1, 3, -3, 1]


def test_char_poly_of_corner_operator():
    assert char_poly(adjoint_matrix(proximal_element(2))).to_list() == [-1, 8, -8, 1]


def test_char_poly_4x4_block():
    rows = [[2, -2, 1, -1], [-2, 4, -1, 2], [1, -1, 1, -1], [-1, 2, -1, 2]]
    # (x-1)^2 (x^2-7x+1) expanded
    assert char_poly(rows).to_list() == [1, -9, 16, -9, 1]


def test_char_poly_against_leibniz_oracle():
    rng = random.Random(6)
    for _ in range(300):
        d = rng.choice([2, 3, 4])
        rows = tuple(tuple(rng.randint(-2, 2) for _ in range(d)) for _ in range(d))
        assert char_poly(rows).to_list() == char_poly_oracle(rows)


def test_det_exact_against_leibniz_oracle():
    rng = random.Random(8)
    for _ in range(200):
        d = rng.choice([2, 3, 4, 5])
        rows = tuple(tuple(rng.randint(-4, 4) for _ in range(d)) for _ in range(d))
        assert det_exact(rows) == det_oracle(rows)


def test_char_poly_constant_term_is_signed_det():
    rng = random.Random(9)
    for _ in range(50):
        d = rng.choice([2, 3, 4])
        rows = tuple(tuple(rng.randint(-3, 3) for _ in range(d)) for _ in range(d))
        assert char_poly(rows).coefficients[0] == (-1) ** d * det_exact(rows)


def test_int_polynomial_requires_monic():
    with pytest.raises(ValueError):
        IntPolynomial((1, 2))
    p = IntPolynomial((-1, 0, 1))
    assert p.degree == 2 and p(3) == 8


# --- generators and the corner element

def test_elementary_generator_counts():
    assert len(elementary_generators(2)) == 4
    assert len(elementary_generators(3)) == 12
    assert all(g.inner.det == 1 for g in elementary_generators(4))


def test_elementary_generators_symmetric_set():
    for d in (2, 3):
        entries = {g.entries for g in elementary_generators(d)}
        assert all(g.inverse().entries in entries for g in elementary_generators(d))


def test_proximal_element_values():
    assert proximal_element(2).to_lists() == [[1, -1], [-1, 2]]
    assert proximal_element(3).to_lists() == [[1, -1, 0], [-1, 2, 0], [0, 0, 1]]
    for d in range(2, 7):
        assert proximal_element(d).inner.det == 1
    with pytest.raises(ValueError):
        proximal_element(1)


def test_unimodular_inverse_exact():
    rng = random.Random(10)
    for _ in range(30):
        d = rng.choice([2, 3, 4])
        g = make_unimodular(d, rng.randint(0, 8), rng)
        assert (g * g.inverse()).entries == UnimodularMatrix.identity(d).entries


def test_type_invariants_enforced():
    with pytest.raises(ValueError):
        TracelessIntMatrix.from_rows([[1, 0], [0, 1]])
    with pytest.raises(ValueError):
        UnimodularMatrix.from_rows([[2, 0], [0, 1]])
    with pytest.raises(ValueError):
        SquareIntMatrix.from_rows([[1, 2, 3], [4, 5, 6]])


def test_json_rows_roundtrip():
    g = proximal_element(3)
    assert UnimodularMatrix.from_rows(g.to_lists()) == g
    a = TracelessIntMatrix.from_rows([[5, -2], [7, -5]])
    assert TracelessIntMatrix.from_rows(a.to_lists()) == a
