"""Dense exact matrices over Z and Q.

Both matrix types are immutable, row-major tuples of Python ints (which are
arbitrary precision) or ``Fraction`` values. Every operation is exact.
"""
from fractions import Fraction
from functools import reduce
from math import lcm

import sympy

from common.errors import DimensionError, NotInvertible
from exactla.polynomials import IntPolynomial


def as_fraction(value):
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not matrix entries")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, sympy.Rational):
        return Fraction(int(value.p), int(value.q))
    raise TypeError(f"cannot use {value!r} as an exact rational")


class RationalMatrix:
    """Exact matrix with ``Fraction`` entries in lowest terms."""

    __slots__ = ("rows", "cols", "_entries")

    def __init__(self, rows, cols, entries):
        entries = tuple(self._coerce(e) for e in entries)
        if len(entries) != rows * cols:
            raise DimensionError(
                f"expected {rows}x{cols}={rows * cols} entries, got {len(entries)}"
            )
        self.rows = rows
        self.cols = cols
        self._entries = entries

    @staticmethod
    def _coerce(value):
        return as_fraction(value)

    # construction -------------------------------------------------------

    @classmethod
    def from_rows(cls, rows):
        rows = [list(r) for r in rows]
        if not rows:
            return cls(0, 0, ())
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise DimensionError("ragged rows")
        return cls(len(rows), width, [e for r in rows for e in r])

    @classmethod
    def identity(cls, n):
        return cls(n, n, [1 if i == j else 0 for i in range(n) for j in range(n)])

    @classmethod
    def zeros(cls, rows, cols=None):
        cols = rows if cols is None else cols
        return cls(rows, cols, [0] * (rows * cols))

    @classmethod
    def diagonal(cls, values):
        n = len(values)
        return cls(n, n, [values[i] if i == j else 0 for i in range(n) for j in range(n)])

    @classmethod
    def block_diagonal(cls, blocks):
        n = sum(b.rows for b in blocks)
        m = sum(b.cols for b in blocks)
        out = [[0] * m for _ in range(n)]
        r0 = c0 = 0
        for block in blocks:
            for i in range(block.rows):
                for j in range(block.cols):
                    out[r0 + i][c0 + j] = block[i, j]
            r0 += block.rows
            c0 += block.cols
        return cls(n, m, [e for row in out for e in row])

    # access ---------------------------------------------------------------

    @property
    def shape(self):
        return (self.rows, self.cols)

    @property
    def is_square(self):
        return self.rows == self.cols

    def __getitem__(self, index):
        i, j = index
        return self._entries[i * self.cols + j]

    def row(self, i):
        return self._entries[i * self.cols:(i + 1) * self.cols]

    def column(self, j):
        return tuple(self._entries[i * self.cols + j] for i in range(self.rows))

    def to_rows(self):
        return [list(self.row(i)) for i in range(self.rows)]

    def entries(self):
        return self._entries

    def submatrix(self, row_slice, col_slice):
        rows = range(self.rows)[row_slice]
        cols = range(self.cols)[col_slice]
        return type(self)(len(rows), len(cols), [self[i, j] for i in rows for j in cols])

    def __eq__(self, other):
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self.shape == other.shape and self._entries == other._entries

    def __hash__(self):
        return hash((self.rows, self.cols, self._entries))

    def __repr__(self):
        return f"{type(self).__name__}({self.to_rows()!r})"

    def __str__(self):
        return "[" + "; ".join(" ".join(str(e) for e in self.row(i)) for i in range(self.rows)) + "]"

    # arithmetic -----------------------------------------------------------

    def _result_type(self, other=None):
        if type(self) is IntegerMatrix and (other is None or type(other) is IntegerMatrix):
            return IntegerMatrix
        return RationalMatrix

    def __add__(self, other):
        if self.shape != other.shape:
            raise DimensionError(f"cannot add {self.shape} and {other.shape}")
        kind = self._result_type(other)
        return kind(self.rows, self.cols, [a + b for a, b in zip(self._entries, other._entries)])

    def __sub__(self, other):
        if self.shape != other.shape:
            raise DimensionError(f"cannot subtract {self.shape} and {other.shape}")
        kind = self._result_type(other)
        return kind(self.rows, self.cols, [a - b for a, b in zip(self._entries, other._entries)])

    def __neg__(self):
        return type(self)(self.rows, self.cols, [-a for a in self._entries])

    def __matmul__(self, other):
        if isinstance(other, (tuple, list)):
            return self.apply(other)
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        kind = self._result_type(other)
        out = []
        for i in range(self.rows):
            row = self.row(i)
            for j in range(other.cols):
                out.append(sum(row[k] * other[k, j] for k in range(self.cols)))
        return kind(self.rows, other.cols, out)

    def apply(self, vector):
        if len(vector) != self.cols:
            raise DimensionError(f"vector of length {len(vector)} for {self.shape} matrix")
        return tuple(sum(a * b for a, b in zip(self.row(i), vector)) for i in range(self.rows))

    def scale(self, factor):
        factor = as_fraction(factor)
        if type(self) is IntegerMatrix and factor.denominator == 1:
            return IntegerMatrix(self.rows, self.cols, [a * int(factor) for a in self._entries])
        return RationalMatrix(self.rows, self.cols, [a * factor for a in self._entries])

    def transpose(self):
        return type(self)(self.cols, self.rows, [self[i, j] for j in range(self.cols) for i in range(self.rows)])

    def kron(self, other):
        """Kronecker product ``self ⊗ other``."""
        kind = self._result_type(other)
        rows, cols = self.rows * other.rows, self.cols * other.cols
        out = [0] * (rows * cols)
        for i in range(self.rows):
            for j in range(self.cols):
                a = self[i, j]
                if not a:
                    continue
                for k in range(other.rows):
                    for l in range(other.cols):
                        out[(i * other.rows + k) * cols + j * other.cols + l] = a * other[k, l]
        return kind(rows, cols, out)

    def is_integral(self):
        return all(Fraction(e).denominator == 1 for e in self._entries)

    def to_integer(self):
        if not self.is_integral():
            raise ValueError("matrix has non-integral entries")
        return IntegerMatrix(self.rows, self.cols, [int(e) for e in self._entries])

    def to_rational(self):
        return RationalMatrix(self.rows, self.cols, self._entries)

    def is_identity(self):
        return self.is_square and self == type(self).identity(self.rows)

    def is_zero(self):
        return not any(self._entries)

    def trace(self):
        _require_square(self)
        return sum(self[i, i] for i in range(self.rows))

    def inverse(self):
        """Exact inverse by Gauss-Jordan elimination over Q."""
        _require_square(self)
        n = self.rows
        work = [[Fraction(x) for x in self.row(i)] + [Fraction(int(i == j)) for j in range(n)]
                for i in range(n)]
        for col in range(n):
            pivot = next((r for r in range(col, n) if work[r][col] != 0), None)
            if pivot is None:
                raise NotInvertible(None, "matrix is singular")
            work[col], work[pivot] = work[pivot], work[col]
            lead = work[col][col]
            work[col] = [x / lead for x in work[col]]
            for r in range(n):
                if r != col and work[r][col] != 0:
                    factor = work[r][col]
                    work[r] = [x - factor * y for x, y in zip(work[r], work[col])]
        inv = RationalMatrix(n, n, [x for row in work for x in row[n:]])
        if type(self) is IntegerMatrix and inv.is_integral():
            return inv.to_integer()
        return inv

    def power(self, exponent):
        _require_square(self)
        base = self if exponent >= 0 else self.inverse()
        result = type(base).identity(self.rows)
        e = abs(exponent)
        while e:
            if e & 1:
                result = result @ base
            base = base @ base
            e >>= 1
        return result

    def determinant(self):
        return det(self)


class IntegerMatrix(RationalMatrix):
    """Exact matrix with arbitrary-precision integer entries."""

    __slots__ = ()

    @staticmethod
    def _coerce(value):
        if isinstance(value, bool):
            raise TypeError("booleans are not matrix entries")
        if isinstance(value, int):
            return value
        frac = as_fraction(value)
        if frac.denominator != 1:
            raise ValueError(f"{value!r} is not an integer")
        return int(frac)


def _require_square(matrix):
    if not matrix.is_square:
        raise DimensionError(f"expected a square matrix, got {matrix.rows}x{matrix.cols}")


def bareiss_determinant(rows):
    """Fraction-free determinant of a square integer matrix (list of lists)."""
    n = len(rows)
    if n == 0:
        return 1
    m = [list(r) for r in rows]
    sign = 1
    previous = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        pivot = m[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                # exact division is guaranteed by Sylvester's identity
                m[i][j] = (pivot * m[i][j] - m[i][k] * m[k][j]) // previous
            m[i][k] = 0
        previous = pivot
    return sign * m[n - 1][n - 1]


def det(matrix):
    """Exact determinant of a square rational or integer matrix."""
    _require_square(matrix)
    n = matrix.rows
    if type(matrix) is IntegerMatrix:
        return Fraction(bareiss_determinant(matrix.to_rows()))
    scale = 1
    rows = []
    for i in range(n):
        row = [Fraction(e) for e in matrix.row(i)]
        common = reduce(lcm, (e.denominator for e in row), 1)
        scale *= common
        rows.append([int(e * common) for e in row])
    return Fraction(bareiss_determinant(rows), scale)


def det_i_minus(matrix):
    """``det(I - M)``, the quantity every Nielsen formula is built from."""
    _require_square(matrix)
    return det(type(matrix).identity(matrix.rows) - matrix)


def char_poly(matrix):
    """Monic characteristic polynomial ``det(xI - M)`` with integer coefficients."""
    _require_square(matrix)
    if not matrix.is_integral():
        raise ValueError("char_poly expects an integer matrix")
    if matrix.rows == 0:
        return IntPolynomial((1,))
    x = sympy.Symbol("x")
    poly = sympy.Matrix(matrix.to_rows()).charpoly(x)
    return IntPolynomial.from_sympy(poly.as_expr(), x)


def cofactor_determinant(rows):
    """Laplace expansion along the first row; an independent oracle for small sizes."""
    n = len(rows)
    if n == 0:
        return 1
    if n == 1:
        return rows[0][0]
    total = 0
    for j in range(n):
        if rows[0][j] == 0:
            continue
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        total += (-1) ** j * rows[0][j] * cofactor_determinant(minor)
    return total


def row_echelon(rows, rhs=None):
    """In-place reduced row echelon form over Q; returns the pivot columns.

    ``rhs`` (a list, same length as ``rows``) is transformed alongside.
    """
    n_rows = len(rows)
    n_cols = len(rows[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(n_cols):
        pivot = next((i for i in range(r, n_rows) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        if rhs is not None:
            rhs[r], rhs[pivot] = rhs[pivot], rhs[r]
        lead = rows[r][c]
        rows[r] = [x / lead for x in rows[r]]
        if rhs is not None:
            rhs[r] = rhs[r] / lead
        for i in range(n_rows):
            if i != r and rows[i][c] != 0:
                factor = rows[i][c]
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[r])]
                if rhs is not None:
                    rhs[i] = rhs[i] - factor * rhs[r]
        pivots.append(c)
        r += 1
        if r == n_rows:
            break
    return pivots


def nullspace(matrix):
    """Basis of the rational kernel, one tuple per free column."""
    rows = [[Fraction(x) for x in matrix.row(i)] for i in range(matrix.rows)]
    pivots = row_echelon(rows)
    free = [c for c in range(matrix.cols) if c not in pivots]
    basis = []
    for f in free:
        vector = [Fraction(0)] * matrix.cols
        vector[f] = Fraction(1)
        for r, c in enumerate(pivots):
            vector[c] = -rows[r][f]
        basis.append(tuple(vector))
    return basis


def solve_rational(matrix, rhs):
    """A particular solution of ``matrix @ x == rhs`` over Q (free variables 0), or None."""
    if len(rhs) != matrix.rows:
        raise DimensionError(f"right-hand side of length {len(rhs)} for {matrix.shape} matrix")
    rows = [[Fraction(x) for x in matrix.row(i)] for i in range(matrix.rows)]
    rhs = [Fraction(x) for x in rhs]
    pivots = row_echelon(rows, rhs)
    if any(rhs[r] != 0 for r in range(len(pivots), matrix.rows)):
        return None
    solution = [Fraction(0)] * matrix.cols
    for r, c in enumerate(pivots):
        solution[c] = rhs[r]
    return tuple(solution)


def rank(matrix):
    rows = [[Fraction(x) for x in matrix.row(i)] for i in range(matrix.rows)]
    return len(row_echelon(rows))
