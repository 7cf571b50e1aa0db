"""Exact scalars and small dense matrices.

Scalars are Python ints or :class:`fractions.Fraction`; Fractions with unit
denominator are folded back to ints so equality and hashing stay structural.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import DimensionError, DomainError

Rat = Fraction
Scalar = Union[int, Fraction]


def norm(x: Scalar) -> Scalar:
    """Fold a Fraction with denominator 1 to int."""
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    if isinstance(x, bool):
        return int(x)
    return x


def parse_rat(text: str | int | Fraction) -> Scalar:
    """Parse ``"p/q"`` or ``"p"`` into a normalized scalar."""
    if isinstance(text, (int, Fraction)):
        return norm(text)
    try:
        return norm(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"not a rational number: {text!r}") from exc


def format_rat(x: Scalar) -> str:
    x = norm(x)
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    return str(x)


def primitive(v: Sequence[int]) -> tuple[int, ...]:
    """Divide an integer vector by the gcd of its entries."""
    g = 0
    for x in v:
        g = math.gcd(g, int(x))
    if g == 0:
        return tuple(int(x) for x in v)
    return tuple(int(x) // g for x in v)


def dot(u: Sequence[Scalar], v: Sequence[Scalar]) -> Scalar:
    if len(u) != len(v):
        raise DimensionError(f"length mismatch {len(u)} vs {len(v)}")
    return norm(sum((a * b for a, b in zip(u, v)), 0))


@dataclass(frozen=True)
class Matrix:
    """Immutable row-major matrix with exact entries."""

    rows: tuple[tuple[Scalar, ...], ...]

    def __post_init__(self) -> None:
        widths = {len(r) for r in self.rows}
        if len(widths) > 1:
            raise DimensionError("ragged matrix rows")

    @classmethod
    def of(cls, rows: Iterable[Iterable[Scalar]]) -> "Matrix":
        return cls(tuple(tuple(norm(x) for x in r) for r in rows))

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence[Scalar]]) -> "Matrix":
        if not cols:
            return cls(())
        return cls.of(zip(*cols))

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls.of([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, r: int, c: int) -> "Matrix":
        return cls.of([[0] * c for _ in range(r)])

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def __getitem__(self, ij: tuple[int, int]) -> Scalar:
        i, j = ij
        return self.rows[i][j]

    def row(self, i: int) -> tuple[Scalar, ...]:
        return self.rows[i]

    def col(self, j: int) -> tuple[Scalar, ...]:
        return tuple(r[j] for r in self.rows)

    def columns(self) -> list[tuple[Scalar, ...]]:
        return [self.col(j) for j in range(self.ncols)]

    @property
    def T(self) -> "Matrix":
        return Matrix.of(zip(*self.rows)) if self.rows else Matrix(())

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.nrows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        cols = other.columns()
        return Matrix.of([[dot(r, c) for c in cols] for r in self.rows])

    def apply_row(self, v: Sequence[Scalar]) -> tuple[Scalar, ...]:
        """Row vector times matrix: ``v · self``."""
        if len(v) != self.nrows:
            raise DimensionError(f"vector of length {len(v)} against {self.shape}")
        return tuple(dot(v, c) for c in self.columns())

    def apply_col(self, v: Sequence[Scalar]) -> tuple[Scalar, ...]:
        """Matrix times column vector."""
        return tuple(dot(r, v) for r in self.rows)

    def scale(self, s: Scalar) -> "Matrix":
        return Matrix.of([[s * x for x in r] for r in self.rows])

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise DimensionError("shape mismatch in addition")
        return Matrix.of([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + other.scale(-1)

    def __neg__(self) -> "Matrix":
        return self.scale(-1)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Matrix":
        return Matrix.of([[self.rows[i][j] for j in cols] for i in rows])

    def permute_rows(self, order: Sequence[int]) -> "Matrix":
        return Matrix(tuple(self.rows[i] for i in order))

    def permute_cols(self, order: Sequence[int]) -> "Matrix":
        return Matrix.of([[r[j] for j in order] for r in self.rows])

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def is_integral(self) -> bool:
        return all(isinstance(x, int) for r in self.rows for x in r)

    def det(self) -> Scalar:
        return det(self)

    def adjugate(self) -> "Matrix":
        return adjugate(self)

    def rank(self) -> int:
        return rank(self)

    def inverse(self) -> "Matrix":
        return inverse(self)

    def to_json(self) -> list[list[int | str]]:
        return [[x if isinstance(x, int) else format_rat(x) for x in r] for r in self.rows]

    @classmethod
    def from_json(cls, data: Sequence[Sequence[int | str]]) -> "Matrix":
        return cls.of([[parse_rat(x) for x in r] for r in data])

    def __str__(self) -> str:
        return "[" + ", ".join("[" + ", ".join(format_rat(x) for x in r) + "]" for r in self.rows) + "]"


def _as_matrix(m: Matrix | Sequence[Sequence[Scalar]]) -> Matrix:
    return m if isinstance(m, Matrix) else Matrix.of(m)


def det(m: Matrix | Sequence[Sequence[Scalar]]) -> Scalar:
    """Determinant by fraction-free (Bareiss) elimination."""
    m = _as_matrix(m)
    if not m.is_square():
        raise DimensionError(f"determinant of non-square {m.shape} matrix")
    n = m.nrows
    if n == 0:
        return 1
    a = [list(r) for r in m.rows]
    sign = 1
    prev: Scalar = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[i][j] * a[k][k] - a[i][k] * a[k][j]
                if isinstance(num, int) and isinstance(prev, int):
                    a[i][j] = num // prev
                else:
                    a[i][j] = norm(Fraction(num) / prev)
            a[i][k] = 0
        prev = a[k][k]
    return norm(sign * a[n - 1][n - 1])


def adjugate(m: Matrix | Sequence[Sequence[Scalar]]) -> Matrix:
    """Classical adjoint: ``m · adj(m) = adj(m) · m = det(m) · I``."""
    m = _as_matrix(m)
    if not m.is_square():
        raise DimensionError(f"adjugate of non-square {m.shape} matrix")
    n = m.nrows
    if n == 1:
        return Matrix.of([[1]])
    idx = range(n)
    out = [[0] * n for _ in idx]
    for i in idx:
        for j in idx:
            minor = m.submatrix([r for r in idx if r != j], [c for c in idx if c != i])
            out[i][j] = (-1) ** (i + j) * det(minor)
    return Matrix.of(out)


def exterior_product(vs: Sequence[Sequence[Scalar]]) -> tuple[Scalar, ...]:
    """Signed-cofactor product of ``n-1`` vectors in dimension ``n``.

    Component ``l`` (1-based) is ``(-1)^l`` times the determinant of the
    ``(n-1) x (n-1)`` matrix whose columns are ``vs`` with row ``l`` removed.
    The result is orthogonal to every input vector.
    """
    count = len(vs)
    n = count + 1
    for v in vs:
        if len(v) != n:
            raise DimensionError(f"expected {n - 1} vectors of length {n}")
    cols = Matrix.from_columns(vs) if vs else Matrix(tuple(() for _ in range(n)))
    out = []
    for l in range(n):
        keep = [r for r in range(n) if r != l]
        minor = Matrix(tuple(cols.rows[r] for r in keep)) if vs else Matrix(())
        out.append(norm((-1) ** (l + 1) * det(minor)))
    return tuple(out)


def row_echelon(m: Matrix) -> tuple[list[list[Scalar]], list[int]]:
    """Reduced row echelon form over the rationals with its pivot columns."""
    a = [[Fraction(x) for x in r] for r in m.rows]
    pivots: list[int] = []
    r = 0
    for c in range(m.ncols):
        p = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        piv = a[r][c]
        a[r] = [x / piv for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    return [[norm(x) for x in row] for row in a], pivots


def rank(m: Matrix | Sequence[Sequence[Scalar]]) -> int:
    m = _as_matrix(m)
    if m.nrows == 0 or m.ncols == 0:
        return 0
    return len(row_echelon(m)[1])


def inverse(m: Matrix) -> Matrix:
    d = det(m)
    if d == 0:
        raise DomainError("singular matrix has no inverse")
    return adjugate(m).scale(Fraction(1) / d if not isinstance(d, int) or abs(d) != 1 else d)


def solve(m: Matrix, b: Sequence[Scalar]) -> tuple[Scalar, ...] | None:
    """Some rational solution of ``m x = b``, or None if inconsistent."""
    aug = Matrix.of([list(r) + [bi] for r, bi in zip(m.rows, b)])
    ech, pivots = row_echelon(aug)
    if m.ncols in pivots:
        return None
    x: list[Scalar] = [0] * m.ncols
    for i, c in enumerate(pivots):
        x[c] = ech[i][-1]
    return tuple(norm(v) for v in x)
