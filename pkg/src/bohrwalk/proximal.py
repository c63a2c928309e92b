"""Spectrum reports for conjugation operators.

An operator is proximal when a single eigenvalue strictly dominates every
other in absolute value and is algebraically simple.  Root finding is the
one place the package leaves exact arithmetic: polynomials are first split
into square-free factors by exact rational arithmetic (so repeated roots
cannot smear the numerics), then each simple factor is solved by companion
eigenvalues and polished by Newton steps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .intmat import IntPolynomial, UnimodularMatrix, adjoint_matrix, char_poly

DEFAULT_GAP_TOL = 1e-9

_NEWTON_CAP = 80


class RootFindingError(RuntimeError):
    """Eigenvalue iteration failed to reach the requested accuracy."""


@dataclass(frozen=True)
class SpectrumReport:
    """Clustered absolute values of an operator's eigenvalues.

    moduli are distinct cluster values in decreasing order, multiplicities the
    matching algebraic counts; top_gap is the ratio of the two largest
    distinct moduli (inf when only one cluster exists).
    """

    moduli: tuple[float, ...]
    multiplicities: tuple[int, ...]
    top_gap: float
    proximal: bool

    @property
    def dimension(self) -> int:
        return sum(self.multiplicities)


def _poly_trim(p: list[Fraction]) -> list[Fraction]:
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    if not p:
        p.append(Fraction(0))
    return p


def _poly_monic(p: list[Fraction]) -> list[Fraction]:
    lead = p[-1]
    if lead == 1:
        return p
    return [c / lead for c in p]


def _poly_deriv(p: list[Fraction]) -> list[Fraction]:
    if len(p) == 1:
        return [Fraction(0)]
    return [c * k for k, c in enumerate(p) if k > 0]


def _poly_divmod(a: list[Fraction], b: list[Fraction]) -> tuple[list[Fraction], list[Fraction]]:
    a = a[:]
    q = [Fraction(0)] * max(1, len(a) - len(b) + 1)
    inv = 1 / b[-1]
    while len(a) >= len(b) and any(c != 0 for c in a):
        shift = len(a) - len(b)
        factor = a[-1] * inv
        q[shift] = factor
        for i, c in enumerate(b):
            a[shift + i] -= factor * c
        a.pop()
        _poly_trim(a)
        if a == [Fraction(0)]:
            break
    return _poly_trim(q), _poly_trim(a)


def _poly_gcd(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    a, b = a[:], b[:]
    while not (len(b) == 1 and b[0] == 0):
        _, r = _poly_divmod(a, b)
        a, b = b, r
    return _poly_monic(a)


def squarefree_factors(p: IntPolynomial) -> list[tuple[list[Fraction], int]]:
    """Yun decomposition p = prod f_i^i with each f_i monic and square-free."""
    f = [Fraction(c) for c in p.coefficients]
    fp = _poly_deriv(f)
    a0 = _poly_gcd(f, fp)
    if len(a0) == 1:
        return [(f, 1)]
    b, _ = _poly_divmod(f, a0)
    c, _ = _poly_divmod(fp, a0)
    d = [x - y for x, y in _zip_pad(c, _poly_deriv(b))]
    _poly_trim(d)
    out: list[tuple[list[Fraction], int]] = []
    i = 1
    while len(b) > 1:
        ai = _poly_gcd(b, d)
        if len(ai) > 1:
            out.append((ai, i))
        b, _ = _poly_divmod(b, ai)
        cnext, _ = _poly_divmod(d, ai)
        d = [x - y for x, y in _zip_pad(cnext, _poly_deriv(b))]
        _poly_trim(d)
        i += 1
    return out


def _zip_pad(a: list[Fraction], b: list[Fraction]) -> list[tuple[Fraction, Fraction]]:
    n = max(len(a), len(b))
    return [
        (a[i] if i < len(a) else Fraction(0), b[i] if i < len(b) else Fraction(0))
        for i in range(n)
    ]


def _roots_of_squarefree(coeffs: list[Fraction], tol: float) -> list[complex]:
    floats = [float(c) for c in coeffs]
    start = np.roots(floats[::-1])
    deriv = _poly_deriv(coeffs)
    dfloats = [float(c) for c in deriv]

    def ev(cs: list[float], z: complex) -> complex:
        acc = 0j
        for c in reversed(cs):
            acc = acc * z + c
        return acc

    polished = []
    for z in start:
        z = complex(z)
        ok = False
        for _ in range(_NEWTON_CAP):
            dz = ev(dfloats, z)
            if dz == 0:
                break
            step = ev(floats, z) / dz
            z -= step
            if abs(step) <= 0.01 * tol * (1.0 + abs(z)):
                ok = True
                break
        if not ok and abs(ev(floats, z)) > tol * (1.0 + abs(z)) ** len(coeffs):
            raise RootFindingError(
                f"Newton polish stalled at z={z!r} after {_NEWTON_CAP} iterations"
            )
        polished.append(z)
    return polished


def eigen_moduli(p: IntPolynomial, tol: float = DEFAULT_GAP_TOL) -> list[tuple[complex, int]]:
    """All complex roots of p with algebraic multiplicities.

    Multiplicities come from the exact square-free split, so only simple
    roots ever reach the numeric solver; each returned root is accurate to
    about tol in absolute terms.
    """
    if p.degree < 1:
        raise ValueError("polynomial must have degree at least 1")
    pairs: list[tuple[complex, int]] = []
    for factor, mult in squarefree_factors(p):
        for z in _roots_of_squarefree(factor, tol):
            pairs.append((z, mult))
    return pairs


def cluster_moduli(
    roots: list[tuple[complex, int]], tol: float = DEFAULT_GAP_TOL
) -> tuple[tuple[float, ...], tuple[int, ...]]:
    """Group root absolute values that differ by less than tol*(1+value)."""
    items = sorted(((abs(z), m) for z, m in roots), reverse=True)
    moduli: list[float] = []
    counts: list[int] = []
    for value, mult in items:
        if moduli and moduli[-1] - value < tol * (1.0 + moduli[-1]):
            total = counts[-1] + mult
            moduli[-1] = (moduli[-1] * counts[-1] + value * mult) / total
            counts[-1] = total
        else:
            moduli.append(value)
            counts.append(mult)
    return tuple(moduli), tuple(counts)


def spectrum_report(p: IntPolynomial, tol: float = DEFAULT_GAP_TOL) -> SpectrumReport:
    roots = eigen_moduli(p, tol)
    moduli, counts = cluster_moduli(roots, tol)
    if len(moduli) > 1:
        gap = moduli[0] / moduli[1]
    else:
        gap = math.inf
    verdict = counts[0] == 1 and gap - 1.0 > tol
    return SpectrumReport(moduli=moduli, multiplicities=counts, top_gap=gap, proximal=verdict)


def is_proximal(g: UnimodularMatrix, tol: float = DEFAULT_GAP_TOL) -> SpectrumReport:
    """Spectrum report for the conjugation operator of g.

    The verdict is true when the top modulus is attained by a single,
    algebraically simple root with relative gap above tol; simplicity of the
    top root is what makes the dominant eigenspace one-dimensional.
    """
    return spectrum_report(char_poly(adjoint_matrix(g)), tol)
