"""Exact arithmetic on rational combinations of square roots.

A value is a finite sum of rational multiples of sqrt(m) for squarefree m
(m = 1 carries the rational part), so expressions like 1/3 + 2*sqrt(2) stay
exact under addition and integer scaling.  Interval evaluation brackets a
value between dyadic rationals whose gap shrinks as 2^-bits; callers widen
the precision until a comparison is decided, and surface the rare
near-boundary failures instead of rounding them away.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

DEFAULT_BITS = 96
MAX_BITS = 4096

_HALF = Fraction(1, 2)


class BoundaryUndecidable(Exception):
    """A comparison stayed unresolved at the precision cap."""

    def __init__(self, message: str, element: object = None):
        super().__init__(message)
        self.element = element


@lru_cache(maxsize=None)
def _floor_sqrt_scaled(m: int, bits: int) -> int:
    # floor(sqrt(m) * 2^bits); the true value lies in [s, s+1) / 2^bits.
    return math.isqrt(m << (2 * bits))


def _squarefree_split(m: int) -> tuple[int, int]:
    """m = square * core with core squarefree; returns (sqrt(square), core)."""
    if m < 1:
        raise ValueError("radicand must be a positive integer")
    root = 1
    core = m
    f = 2
    while f * f <= core:
        while core % (f * f) == 0:
            core //= f * f
            root *= f
        f += 1
    return root, core


@dataclass(frozen=True)
class SurdNumber:
    """Sum of rational multiples of square roots of squarefree integers."""

    terms: tuple[tuple[int, Fraction], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "terms", _normalize(dict(self.terms)))

    @classmethod
    def rational(cls, value: Fraction | int | str) -> "SurdNumber":
        return cls(((1, Fraction(value)),))

    @classmethod
    def sqrt(cls, m: int, coefficient: Fraction | int | str = 1) -> "SurdNumber":
        return cls(((int(m), Fraction(coefficient)),))

    @classmethod
    def zero(cls) -> "SurdNumber":
        return cls(())

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_rational(self) -> bool:
        return all(m == 1 for m, _ in self.terms)

    def rational_value(self) -> Fraction:
        if not self.is_rational:
            raise ValueError(f"{self} is not rational")
        return self.terms[0][1] if self.terms else Fraction(0)

    def __add__(self, other: "SurdNumber") -> "SurdNumber":
        acc = dict(self.terms)
        for m, c in other.terms:
            acc[m] = acc.get(m, Fraction(0)) + c
        return SurdNumber(tuple(acc.items()))

    def __sub__(self, other: "SurdNumber") -> "SurdNumber":
        return self + (-other)

    def __neg__(self) -> "SurdNumber":
        return SurdNumber(tuple((m, -c) for m, c in self.terms))

    def scaled(self, k: int | Fraction) -> "SurdNumber":
        k = Fraction(k)
        if k == 0:
            return SurdNumber.zero()
        return SurdNumber(tuple((m, c * k) for m, c in self.terms))

    def interval(self, bits: int = DEFAULT_BITS) -> tuple[Fraction, Fraction]:
        """Exact bracket lo <= value < hi with hi - lo <= sum|coef| * 2^-bits."""
        lo = Fraction(0)
        hi = Fraction(0)
        scale = Fraction(1, 1 << bits)
        for m, c in self.terms:
            if m == 1:
                lo += c
                hi += c
                continue
            s = _floor_sqrt_scaled(m, bits)
            slo = s * scale
            shi = (s + 1) * scale
            if c >= 0:
                lo += c * slo
                hi += c * shi
            else:
                lo += c * shi
                hi += c * slo
        return lo, hi

    def __float__(self) -> float:
        lo, hi = self.interval(64)
        return float((lo + hi) / 2)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.terms:
            if m == 1:
                parts.append(str(c))
            elif c == 1:
                parts.append(f"sqrt{m}")
            else:
                parts.append(f"{c}*sqrt{m}")
        return " + ".join(parts).replace("+ -", "- ")

    def to_json(self) -> list[dict]:
        return [{"m": m, "coef": str(c)} for m, c in self.terms]

    @classmethod
    def from_json(cls, doc: object) -> "SurdNumber":
        if isinstance(doc, str):
            return parse_surd(doc)
        if isinstance(doc, (int, float)):
            return cls.rational(Fraction(str(doc)))
        assert isinstance(doc, Iterable)
        return cls(tuple((int(t["m"]), Fraction(t["coef"])) for t in doc))


def _normalize(acc: dict[int, Fraction]) -> tuple[tuple[int, Fraction], ...]:
    out: dict[int, Fraction] = {}
    for m, c in acc.items():
        if c == 0:
            continue
        root, core = _squarefree_split(int(m))
        coef = Fraction(c) * root
        out[core] = out.get(core, Fraction(0)) + coef
    return tuple(sorted((m, c) for m, c in out.items() if c != 0))


_TERM_RE = re.compile(
    r"^(?P<coef>\d+(?:/\d+)?|\d*\.\d+)?\s*\*?\s*(?:sqrt\(?(?P<m>\d+)\)?)?(?:\s*/\s*(?P<div>\d+))?$"
)


def parse_surd(text: str) -> SurdNumber:
    """Parse strings like 'sqrt2', '2*sqrt3/5', '1/4', '0.1+sqrt2'."""
    s = text.strip().replace(" ", "")
    if not s:
        raise ValueError("empty frequency string")
    # split into signed terms
    chunks: list[tuple[int, str]] = []
    sign = 1
    buf = ""
    for ch in s:
        if ch in "+-" and buf:
            chunks.append((sign, buf))
            sign = 1 if ch == "+" else -1
            buf = ""
        elif ch in "+-" and not buf:
            sign = sign * (1 if ch == "+" else -1)
        else:
            buf += ch
    if buf:
        chunks.append((sign, buf))
    total = SurdNumber.zero()
    for sgn, chunk in chunks:
        m = _TERM_RE.match(chunk)
        if not m or (m.group("coef") is None and m.group("m") is None):
            raise ValueError(f"cannot parse frequency term {chunk!r} in {text!r}")
        coef = Fraction(m.group("coef")) if m.group("coef") else Fraction(1)
        if m.group("div"):
            coef /= int(m.group("div"))
        radicand = int(m.group("m")) if m.group("m") else 1
        total = total + SurdNumber.sqrt(radicand, sgn * coef)
    return total


def fractional_interval(
    value: SurdNumber,
    bits: int = DEFAULT_BITS,
    max_bits: int = MAX_BITS,
) -> tuple[Fraction, Fraction]:
    """Bracket of the fractional part, guaranteed not to straddle an integer.

    Escalates precision until the bracket fits inside one unit interval;
    raises BoundaryUndecidable when the cap is reached (value suspiciously
    close to an integer).
    """
    while True:
        lo, hi = value.interval(bits)
        base = math.floor(lo)
        flo = lo - base
        fhi = hi - base
        if fhi <= 1:
            return flo, fhi
        if bits >= max_bits:
            raise BoundaryUndecidable(
                f"fractional part of {value} unresolved at {bits} bits", value
            )
        bits = min(2 * bits, max_bits)


def _dist_range_unit(a: Fraction, b: Fraction) -> tuple[Fraction, Fraction]:
    # distance-to-0 on the circle for t in [a, b] with 0 <= a <= b <= 1
    fa = min(a, 1 - a)
    fb = min(b, 1 - b)
    lo, hi = min(fa, fb), max(fa, fb)
    if a <= _HALF <= b:
        hi = _HALF
    return lo, hi


def circle_distance_interval(
    lo: Fraction, hi: Fraction, center: Fraction
) -> tuple[Fraction, Fraction]:
    """Range of circle distance to center for a value known to lie in [lo, hi]."""
    width = hi - lo
    if width >= 1:
        return Fraction(0), _HALF
    u = (lo - center) % 1
    v = u + width
    if v <= 1:
        return _dist_range_unit(u, v)
    l1, h1 = _dist_range_unit(u, Fraction(1))
    l2, h2 = _dist_range_unit(Fraction(0), v - 1)
    return min(l1, l2), max(h1, h2)
