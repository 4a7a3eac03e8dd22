"""Smith normal form with unimodular transforms, and lattice cokernels.

``smith_normal_form(M)`` returns ``U, D, V`` with ``U @ M @ V == D``. The
cokernel ``Z^n / M Z^n`` is then ``⊕ Z/d_i`` and residues can be moved
between the two descriptions with ``U`` and ``U^-1``.
"""
from dataclasses import dataclass
from itertools import product

from common.errors import DimensionError
from exactla.matrices import IntegerMatrix, det


@dataclass(frozen=True)
class SmithDecomposition:
    U: IntegerMatrix
    D: IntegerMatrix
    V: IntegerMatrix
    U_inverse: IntegerMatrix

    @property
    def invariants(self):
        """Diagonal of D (length min(rows, cols))."""
        return tuple(self.D[i, i] for i in range(min(self.D.rows, self.D.cols)))

    def check(self, matrix):
        """Re-verify every invariant of the decomposition against ``matrix``."""
        if self.U @ matrix @ self.V != self.D:
            return False
        if abs(det(self.U)) != 1 or abs(det(self.V)) != 1:
            return False
        for i in range(self.D.rows):
            for j in range(self.D.cols):
                if i != j and self.D[i, j] != 0:
                    return False
        d = self.invariants
        if any(x < 0 for x in d):
            return False
        for a, b in zip(d, d[1:]):
            if a == 0 and b != 0:
                return False
            if a != 0 and b % a != 0:
                return False
        return True


class _Reducer:
    """Mutable working state: D, the row transform U, its inverse, and V."""

    def __init__(self, matrix):
        self.n, self.m = matrix.rows, matrix.cols
        self.D = matrix.to_rows()
        self.U = IntegerMatrix.identity(self.n).to_rows()
        self.U_inv = IntegerMatrix.identity(self.n).to_rows()
        self.V = IntegerMatrix.identity(self.m).to_rows()

    def swap_rows(self, i, j):
        if i == j:
            return
        self.D[i], self.D[j] = self.D[j], self.D[i]
        self.U[i], self.U[j] = self.U[j], self.U[i]
        for row in self.U_inv:
            row[i], row[j] = row[j], row[i]

    def swap_cols(self, i, j):
        if i == j:
            return
        for row in self.D:
            row[i], row[j] = row[j], row[i]
        for row in self.V:
            row[i], row[j] = row[j], row[i]

    def add_row(self, target, source, factor):
        """row_target += factor * row_source."""
        if not factor:
            return
        self.D[target] = [a + factor * b for a, b in zip(self.D[target], self.D[source])]
        self.U[target] = [a + factor * b for a, b in zip(self.U[target], self.U[source])]
        for row in self.U_inv:
            row[source] -= factor * row[target]

    def add_col(self, target, source, factor):
        """col_target += factor * col_source."""
        if not factor:
            return
        for row in self.D:
            row[target] += factor * row[source]
        for row in self.V:
            row[target] += factor * row[source]

    def negate_row(self, i):
        self.D[i] = [-a for a in self.D[i]]
        self.U[i] = [-a for a in self.U[i]]
        for row in self.U_inv:
            row[i] = -row[i]

    def smallest_nonzero(self, t):
        best = None
        for i in range(t, self.n):
            for j in range(t, self.m):
                value = self.D[i][j]
                if value and (best is None or abs(value) < abs(self.D[best[0]][best[1]])):
                    best = (i, j)
        return best

    def reduce(self):
        for t in range(min(self.n, self.m)):
            while True:
                pivot = self.smallest_nonzero(t)
                if pivot is None:
                    return
                self.swap_rows(t, pivot[0])
                self.swap_cols(t, pivot[1])
                p = self.D[t][t]
                clean = True
                for i in range(t + 1, self.n):
                    q = self.D[i][t] // p
                    self.add_row(i, t, -q)
                    if self.D[i][t]:
                        clean = False
                for j in range(t + 1, self.m):
                    q = self.D[t][j] // p
                    self.add_col(j, t, -q)
                    if self.D[t][j]:
                        clean = False
                if not clean:
                    continue
                offender = next(
                    (i for i in range(t + 1, self.n) for j in range(t + 1, self.m)
                     if self.D[i][j] % p),
                    None,
                )
                if offender is None:
                    break
                self.add_row(t, offender, 1)
            if self.D[t][t] < 0:
                self.negate_row(t)


def smith_normal_form(matrix):
    """Smith decomposition of an integer matrix (any shape)."""
    if not isinstance(matrix, IntegerMatrix):
        matrix = matrix.to_integer()
    work = _Reducer(matrix)
    work.reduce()
    return SmithDecomposition(
        U=IntegerMatrix.from_rows(work.U) if work.n else IntegerMatrix(0, 0, ()),
        D=IntegerMatrix(work.n, work.m, [e for row in work.D for e in row]),
        V=IntegerMatrix.from_rows(work.V) if work.m else IntegerMatrix(0, 0, ()),
        U_inverse=IntegerMatrix.from_rows(work.U_inv) if work.n else IntegerMatrix(0, 0, ()),
    )


@dataclass(frozen=True)
class CokernelClasses:
    """Z^n modulo the column lattice of a square M.

    ``representatives`` is ``None`` when the cokernel is infinite
    (det M == 0); otherwise it holds one integer vector per coset, ordered
    lexicographically by their Smith residues, the zero vector first.
    """

    matrix: IntegerMatrix
    smith: SmithDecomposition
    representatives: tuple = None

    @property
    def is_finite(self):
        return self.representatives is not None

    @property
    def count(self):
        from common.counts import INFINITE
        return len(self.representatives) if self.is_finite else INFINITE

    def residue(self, vector):
        """Smith residue tuple of ``vector`` (entries in [0, d_i))."""
        w = self.smith.U.apply(tuple(vector))
        return tuple(x % d if d else x for x, d in zip(w, self.smith.invariants))

    def index_of(self, vector):
        """Position of the representative congruent to ``vector``."""
        if not self.is_finite:
            raise ValueError("cokernel is infinite")
        residue = self.residue(vector)
        return self._residues().index(residue)

    def _residues(self):
        d = self.smith.invariants
        return sorted(product(*(range(x) for x in d)))

    def contains(self, vector):
        """True when ``vector`` lies in the column lattice of the matrix."""
        return lattice_solve(self.matrix, vector, self.smith) is not None


def cokernel_classes(matrix):
    if not matrix.is_square:
        raise DimensionError("cokernel_classes expects a square matrix")
    smith = smith_normal_form(matrix)
    d = smith.invariants
    if any(x == 0 for x in d):
        return CokernelClasses(matrix=matrix, smith=smith)
    reps = tuple(smith.U_inverse.apply(r) for r in sorted(product(*(range(x) for x in d))))
    return CokernelClasses(matrix=matrix, smith=smith, representatives=reps)


def lattice_solve(matrix, vector, smith=None):
    """An integer ``u`` with ``matrix @ u == vector``, or ``None`` if none exists."""
    smith = smith or smith_normal_form(matrix)
    w = smith.U.apply(tuple(vector))
    d = smith.invariants
    y = [0] * matrix.cols
    for i, value in enumerate(w):
        di = d[i] if i < len(d) else 0
        if di == 0:
            if value != 0:
                return None
            continue
        if value % di:
            return None
        y[i] = value // di
    return smith.V.apply(tuple(y))
