"""Exact integer linear algebra on the traceless matrix lattice.

Everything here runs on arbitrary-precision Python integers, so results stay
exact at any entry size.  Traceless d x d integer matrices are identified
with Z^(d*d-1) by listing entries row by row and omitting the (d,d) slot;
the omitted entry is recovered as minus the sum of the other diagonal
entries.  That ordering is fixed once here and used by every other module.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

Rows = tuple[tuple[int, ...], ...]


def coord_rank(d: int) -> int:
    """Number of free coordinates of a traceless d x d integer matrix."""
    return d * d - 1


def freeze_rows(rows: Iterable[Iterable[int]]) -> Rows:
    return tuple(tuple(int(v) for v in row) for row in rows)


def mat_identity(n: int) -> Rows:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def mat_mul(a: Rows, b: Rows) -> Rows:
    if len(a[0]) != len(b):
        raise ValueError(f"dimension mismatch: {len(a[0])} columns vs {len(b)} rows")
    bt = tuple(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def mat_transpose(a: Rows) -> Rows:
    return tuple(tuple(col) for col in zip(*a))


def mat_trace(a: Rows) -> int:
    return sum(a[i][i] for i in range(len(a)))


def mat_max_abs(a: Rows) -> int:
    return max(abs(v) for row in a for v in row)


def det_exact(rows: Rows) -> int:
    """Determinant by fraction-free (Bareiss) elimination.

    Every interior division is exact, so the result is correct for integer
    input of any size; cost is O(n^3) ring operations.
    """
    n = len(rows)
    m = [list(r) for r in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = m[k][k]
        for i in range(k + 1, n):
            row_i = m[i]
            row_k = m[k]
            lead = row_i[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * pivot - lead * row_k[j]) // prev
            row_i[k] = 0
        prev = pivot
    return sign * m[n - 1][n - 1]


def adjugate(rows: Rows) -> Rows:
    """Transpose of the cofactor matrix; rows * adjugate = det * identity."""
    n = len(rows)
    if n == 1:
        return ((1,),)
    cof = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = tuple(
                tuple(rows[r][c] for c in range(n) if c != j)
                for r in range(n)
                if r != i
            )
            cof[i][j] = (-1) ** (i + j) * det_exact(minor)
    return tuple(tuple(cof[j][i] for j in range(n)) for i in range(n))


@dataclass(frozen=True)
class SquareIntMatrix:
    """Immutable square matrix of arbitrary-precision integers."""

    entries: Rows

    def __post_init__(self) -> None:
        rows = freeze_rows(self.entries)
        if not rows or any(len(r) != len(rows) for r in rows):
            raise ValueError("entries must form a non-empty square array")
        object.__setattr__(self, "entries", rows)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "SquareIntMatrix":
        return cls(freeze_rows(rows))

    @classmethod
    def identity(cls, d: int) -> "SquareIntMatrix":
        return cls(mat_identity(d))

    @property
    def d(self) -> int:
        return len(self.entries)

    @property
    def trace(self) -> int:
        return mat_trace(self.entries)

    @property
    def det(self) -> int:
        return det_exact(self.entries)

    def transpose(self) -> "SquareIntMatrix":
        return SquareIntMatrix(mat_transpose(self.entries))

    def __mul__(self, other: "SquareIntMatrix") -> "SquareIntMatrix":
        if not isinstance(other, SquareIntMatrix):
            return NotImplemented
        return SquareIntMatrix(mat_mul(self.entries, other.entries))

    def to_lists(self) -> list[list[int]]:
        return [list(row) for row in self.entries]


@dataclass(frozen=True)
class TracelessIntMatrix:
    """Integer matrix with zero trace, the lattice the conjugation orbit lives in."""

    inner: SquareIntMatrix

    def __post_init__(self) -> None:
        if self.inner.trace != 0:
            raise ValueError(f"trace must vanish, got {self.inner.trace}")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "TracelessIntMatrix":
        return cls(SquareIntMatrix.from_rows(rows))

    @classmethod
    def zero(cls, d: int) -> "TracelessIntMatrix":
        return cls(SquareIntMatrix(tuple(tuple(0 for _ in range(d)) for _ in range(d))))

    @property
    def d(self) -> int:
        return self.inner.d

    @property
    def entries(self) -> Rows:
        return self.inner.entries

    def __add__(self, other: "TracelessIntMatrix") -> "TracelessIntMatrix":
        if self.d != other.d:
            raise ValueError("dimension mismatch")
        return TracelessIntMatrix.from_rows(
            [
                [a + b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.entries, other.entries)
            ]
        )

    def __sub__(self, other: "TracelessIntMatrix") -> "TracelessIntMatrix":
        return self + (-other)

    def __neg__(self) -> "TracelessIntMatrix":
        return TracelessIntMatrix.from_rows([[-v for v in row] for row in self.entries])

    def to_lists(self) -> list[list[int]]:
        return self.inner.to_lists()


@dataclass(frozen=True)
class UnimodularMatrix:
    """Integer matrix of determinant one."""

    inner: SquareIntMatrix

    def __post_init__(self) -> None:
        if self.inner.det != 1:
            raise ValueError(f"determinant must be 1, got {self.inner.det}")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "UnimodularMatrix":
        return cls(SquareIntMatrix.from_rows(rows))

    @classmethod
    def identity(cls, d: int) -> "UnimodularMatrix":
        return cls(SquareIntMatrix.identity(d))

    @property
    def d(self) -> int:
        return self.inner.d

    @property
    def entries(self) -> Rows:
        return self.inner.entries

    def inverse(self) -> "UnimodularMatrix":
        # det = 1, so the adjugate is the exact inverse; no rationals needed.
        return UnimodularMatrix(SquareIntMatrix(adjugate(self.entries)))

    def __mul__(self, other: "UnimodularMatrix") -> "UnimodularMatrix":
        if not isinstance(other, UnimodularMatrix):
            return NotImplemented
        return UnimodularMatrix(SquareIntMatrix(mat_mul(self.entries, other.entries)))

    def to_lists(self) -> list[list[int]]:
        return self.inner.to_lists()


@dataclass(frozen=True)
class CoordVector:
    """Coordinates of a traceless matrix: row-major entries minus the (d,d) slot."""

    d: int
    coords: tuple[int, ...]

    def __post_init__(self) -> None:
        coords = tuple(int(v) for v in self.coords)
        if self.d < 2:
            raise ValueError("d must be at least 2")
        if len(coords) != coord_rank(self.d):
            raise ValueError(
                f"expected {coord_rank(self.d)} coordinates for d={self.d}, got {len(coords)}"
            )
        object.__setattr__(self, "coords", coords)

    @classmethod
    def zero(cls, d: int) -> "CoordVector":
        return cls(d, tuple(0 for _ in range(coord_rank(d))))

    def __sub__(self, other: "CoordVector") -> "CoordVector":
        if self.d != other.d:
            raise ValueError("dimension mismatch")
        return CoordVector(self.d, tuple(a - b for a, b in zip(self.coords, other.coords)))


@dataclass(frozen=True)
class AdjointOperator:
    """Integer matrix of h -> g^-1 h g in lattice coordinates; always unimodular."""

    d: int
    matrix: Rows

    def __post_init__(self) -> None:
        rows = freeze_rows(self.matrix)
        n = coord_rank(self.d)
        if len(rows) != n or any(len(r) != n for r in rows):
            raise ValueError(f"operator for d={self.d} must be {n}x{n}")
        object.__setattr__(self, "matrix", rows)
        if det_exact(rows) != 1:
            raise ValueError("conjugation operator must have determinant 1")

    def to_lists(self) -> list[list[int]]:
        return [list(row) for row in self.matrix]


@dataclass(frozen=True)
class IntPolynomial:
    """Monic integer polynomial, coefficients stored lowest degree first."""

    coefficients: tuple[int, ...]

    def __post_init__(self) -> None:
        coeffs = tuple(int(c) for c in self.coefficients)
        if not coeffs or coeffs[-1] != 1:
            raise ValueError("polynomial must be monic with at least one coefficient")
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, x: complex) -> complex:
        acc: complex = 0
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def to_list(self) -> list[int]:
        return list(self.coefficients)


def coords_of(a: TracelessIntMatrix) -> CoordVector:
    """Row-major listing of all entries except the redundant (d,d) one."""
    d = a.d
    e = a.entries
    coords = tuple(
        e[i][j] for i in range(d) for j in range(d) if not (i == d - 1 and j == d - 1)
    )
    return CoordVector(d, coords)


def coords_to(v: CoordVector) -> TracelessIntMatrix:
    """Inverse of coords_of: rebuild the matrix, restoring the (d,d) entry."""
    d = v.d
    it = iter(v.coords)
    rows = [[0] * d for _ in range(d)]
    for i in range(d):
        for j in range(d):
            if i == d - 1 and j == d - 1:
                continue
            rows[i][j] = next(it)
    rows[d - 1][d - 1] = -sum(rows[i][i] for i in range(d - 1))
    return TracelessIntMatrix.from_rows(rows)


def conjugate(g: UnimodularMatrix, a: TracelessIntMatrix) -> TracelessIntMatrix:
    """g^-1 * a * g, exact; preserves trace and characteristic polynomial."""
    if g.d != a.d:
        raise ValueError(f"dimension mismatch: g is {g.d}x{g.d}, a is {a.d}x{a.d}")
    rows = mat_mul(mat_mul(g.inverse().entries, a.entries), g.entries)
    return TracelessIntMatrix.from_rows(rows)


def adjoint_matrix(g: UnimodularMatrix) -> AdjointOperator:
    """Coordinate matrix of conjugation by g, one column per basis matrix.

    Column j holds the coordinates of g^-1 B_j g where B_j is the j-th
    coordinate basis matrix, so for every traceless h the identity
    coords_of(conjugate(g, h)) = matrix . coords_of(h) holds exactly.
    """
    d = g.d
    n = coord_rank(d)
    ginv = g.inverse().entries
    cols = []
    for j in range(n):
        basis = coords_to(CoordVector(d, tuple(1 if i == j else 0 for i in range(n))))
        image = mat_mul(mat_mul(ginv, basis.entries), g.entries)
        cols.append(coords_of(TracelessIntMatrix.from_rows(image)).coords)
    rows = tuple(tuple(cols[j][i] for j in range(n)) for i in range(n))
    return AdjointOperator(d, rows)


def char_poly(
    m: SquareIntMatrix | TracelessIntMatrix | UnimodularMatrix | AdjointOperator | Sequence[Sequence[int]],
) -> IntPolynomial:
    """Monic characteristic polynomial det(lambda I - M) by Faddeev-LeVerrier.

    The recurrence M_k = M (M_{k-1} + c_{n-k+1} I), c_{n-k} = -tr(M_k)/k needs
    one division per step, and that division is exact over the integers, so
    the whole computation stays in integer arithmetic.
    """
    rows = _as_rows(m)
    n = len(rows)
    coeffs = [0] * (n + 1)
    coeffs[n] = 1
    mk = rows
    c = -mat_trace(mk)
    coeffs[n - 1] = c
    for k in range(2, n + 1):
        shifted = tuple(
            tuple(mk[i][j] + (c if i == j else 0) for j in range(n)) for i in range(n)
        )
        mk = mat_mul(rows, shifted)
        q, r = divmod(-mat_trace(mk), k)
        if r:
            raise ArithmeticError("characteristic polynomial recurrence lost exactness")
        c = q
        coeffs[n - k] = c
    return IntPolynomial(tuple(coeffs))


def _as_rows(m: object) -> Rows:
    if isinstance(m, (TracelessIntMatrix, UnimodularMatrix)):
        return m.inner.entries
    if isinstance(m, SquareIntMatrix):
        return m.entries
    if isinstance(m, AdjointOperator):
        return m.matrix
    rows = freeze_rows(m)  # type: ignore[arg-type]
    if not rows or any(len(r) != len(rows) for r in rows):
        raise ValueError("expected a square integer matrix")
    return rows


def elementary_generators(d: int) -> list[UnimodularMatrix]:
    """The 2d(d-1) transvections I + t*E_ij, t = +-1, i != j.

    The set is symmetric (closed under inverses) and generates the whole
    determinant-one group.
    """
    if d < 2:
        raise ValueError("d must be at least 2")
    out = []
    for i in range(d):
        for j in range(d):
            if i == j:
                continue
            for t in (1, -1):
                rows = [[1 if r == c else 0 for c in range(d)] for r in range(d)]
                rows[i][j] = t
                out.append(UnimodularMatrix.from_rows(rows))
    return out


def proximal_element(d: int) -> UnimodularMatrix:
    """Unimodular matrix whose conjugation action has a simple dominant eigenvalue.

    For d = 2 this is [[1,-1],[-1,2]]; for larger d the same 2x2 block sits in
    the top-left corner and the rest is the identity.
    """
    if d < 2:
        raise ValueError("d must be at least 2")
    rows = [[1 if r == c else 0 for c in range(d)] for r in range(d)]
    rows[0][0], rows[0][1] = 1, -1
    rows[1][0], rows[1][1] = -1, 2
    return UnimodularMatrix.from_rows(rows)
