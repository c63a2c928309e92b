import math
import random

import pytest

from bohrwalk.intmat import IntPolynomial, UnimodularMatrix, adjoint_matrix, char_poly, proximal_element
from bohrwalk.proximal import (
    cluster_moduli,
    eigen_moduli,
    is_proximal,
    spectrum_report,
    squarefree_factors,
)
from helpers import make_unimodular

TOP = (7 + 3 * math.sqrt(5)) / 2
TOP_INV = (7 - 3 * math.sqrt(5)) / 2
MID = (3 + math.sqrt(5)) / 2
MID_INV = (3 - math.sqrt(5)) / 2


def test_quadratic_roots_match_closed_form():
    roots = eigen_moduli(IntPolynomial((1, -7, 1)))
    moduli = sorted(abs(z) for z, _ in roots)
    assert moduli[0] == pytest.approx(TOP_INV, abs=1e-12)
    assert moduli[1] == pytest.approx(TOP, abs=1e-12)


def test_linear_root():
    roots = eigen_moduli(IntPolynomial((-1, 1)))
    assert len(roots) == 1
    z, mult = roots[0]
    assert mult == 1 and abs(z - 1) < 1e-14


def test_second_quadratic():
    roots = eigen_moduli(IntPolynomial((1, -3, 1)))
    moduli = sorted(abs(z) for z, _ in roots)
    assert moduli[0] == pytest.approx(MID_INV, abs=1e-12)
    assert moduli[1] == pytest.approx(MID, abs=1e-12)


def test_squarefree_split_recovers_multiplicities():
    # (x - 1)^2 (x^2 - 7x + 1) = x^4 - 9x^3 + 16x^2 - 9x + 1
    p = IntPolynomial((1, -9, 16, -9, 1))
    factors = squarefree_factors(p)
    mults = sorted((len(f) - 1, m) for f, m in factors)
    assert mults == [(1, 2), (2, 1)]


def test_repeated_roots_reported_exactly():
    # (x - 1)^5: LAPACK alone would scatter this by ~1e-3
    p = IntPolynomial((-1, 5, -10, 10, -5, 1))
    roots = eigen_moduli(p)
    assert len(roots) == 1
    z, mult = roots[0]
    assert mult == 5 and abs(z - 1) < 1e-12


def test_corner_element_is_proximal():
    report = is_proximal(proximal_element(2))
    assert report.proximal
    assert report.moduli[0] == pytest.approx(TOP, abs=1e-9)
    assert report.multiplicities[0] == 1
    assert report.dimension == 3


def test_identity_is_not_proximal():
    report = is_proximal(UnimodularMatrix.identity(2))
    assert not report.proximal
    assert report.moduli == (1.0,)
    assert report.multiplicities == (3,)
    assert report.top_gap == math.inf


def test_d4_modulus_multiset():
    report = is_proximal(proximal_element(4))
    assert report.proximal
    assert report.multiplicities == (1, 4, 5, 4, 1)
    expected = [TOP, MID, 1.0, MID_INV, TOP_INV]
    for got, want in zip(report.moduli, expected):
        assert got == pytest.approx(want, abs=1e-9)


def test_corner_family_shares_top_modulus():
    for d in range(2, 6):
        report = is_proximal(proximal_element(d))
        assert report.proximal
        assert report.moduli[0] == pytest.approx(TOP, abs=1e-9)
        assert report.dimension == d * d - 1


def test_modulus_product_matches_constant_coefficient():
    rng = random.Random(11)
    for _ in range(20):
        d = rng.choice([2, 3])
        g = make_unimodular(d, rng.randint(1, 6), rng)
        p = char_poly(adjoint_matrix(g))
        report = spectrum_report(p)
        prod = 1.0
        for value, mult in zip(report.moduli, report.multiplicities):
            prod *= value**mult
        assert prod == pytest.approx(abs(p.coefficients[0]), abs=1e-8)


def test_cluster_merges_close_moduli():
    roots = [(1.0 + 0j, 1), (complex(0, 1.0 + 1e-12), 1), (0.5 + 0j, 2)]
    moduli, counts = cluster_moduli(roots, tol=1e-9)
    assert counts == (2, 2)
    assert moduli[0] == pytest.approx(1.0, abs=1e-9)


def test_degree_zero_rejected():
    with pytest.raises(ValueError):
        eigen_moduli(IntPolynomial((1,)))
