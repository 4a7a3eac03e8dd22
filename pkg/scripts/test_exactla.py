import random
from fractions import Fraction

import numpy as np
import pytest

from common.errors import NotInvertible
from exactla.matrices import (
    IntegerMatrix,
    RationalMatrix,
    bareiss_determinant,
    char_poly,
    cofactor_determinant,
    det,
    det_i_minus,
    nullspace,
    rank,
    solve_rational,
)
from exactla.polynomials import (
    IntPolynomial,
    all_roots_real_positive,
    count_real_roots,
    cyclotomic_factor_scan,
    cyclotomic_polynomial,
)
from exactla.smith import cokernel_classes, lattice_solve, smith_normal_form


def test_determinants_agree_on_random_matrices():
    """Bareiss and cofactor expansion give the same determinant"""
    rng = random.Random(11)
    for _ in range(60):
        n = rng.randint(1, 5)
        rows = [[rng.randint(-4, 4) for _ in range(n)] for _ in range(n)]
        assert bareiss_determinant(rows) == cofactor_determinant(rows)


def test_rational_determinant_and_inverse():
    M = RationalMatrix.from_rows([[Fraction(1, 2), 1], [3, Fraction(2, 3)]])
    assert det(M) == Fraction(1, 3) - 3
    assert M @ M.inverse() == RationalMatrix.identity(2)


def test_det_i_minus():
    F = IntegerMatrix.from_rows([[2, 0], [0, 3]])
    assert det_i_minus(F) == 2


def test_singular_inverse_raises():
    with pytest.raises(NotInvertible):
        RationalMatrix.from_rows([[1, 2], [2, 4]]).inverse()


def test_char_poly_of_the_conjugation_matrix(matrix_A):
    """char_poly(A) = (x + 1)(x^4 - x^3 - x^2 - x + 1)"""
    expected = IntPolynomial((1, 1)) * IntPolynomial((1, -1, -1, -1, 1))
    assert char_poly(matrix_A) == expected
    assert cyclotomic_factor_scan(IntPolynomial((1, -1, -1, -1, 1))) == []
    assert cyclotomic_factor_scan(char_poly(matrix_A)) == [2]


def test_cyclotomic_scan():
    assert cyclotomic_factor_scan(IntPolynomial((1, 0, 1))) == [4]
    assert cyclotomic_factor_scan(IntPolynomial((-1, 1))) == []
    assert cyclotomic_factor_scan(IntPolynomial((-1, 1)), include_trivial=True) == [1]
    assert cyclotomic_polynomial(6) == IntPolynomial((1, -1, 1))


def test_cyclotomic_scan_matches_roots_of_unity():
    """d is reported exactly when a primitive d-th root of unity is a root, d <= 12"""
    rng = random.Random(31)
    for _ in range(40):
        poly = IntPolynomial((1,))
        for d in rng.sample(range(1, 13), rng.randint(0, 2)):
            poly = poly * cyclotomic_polynomial(d)
        c0, c1, c2 = rng.randint(-3, 3), rng.randint(-3, 3), rng.choice([-2, -1, 1, 2])
        poly = poly * IntPolynomial((c0, c1, c2))
        scanned = {d for d in cyclotomic_factor_scan(poly, include_trivial=True) if d <= 12}
        vanishing = {d for d in range(1, 13) if abs(poly(np.exp(2j * np.pi / d))) < 1e-9}
        assert scanned == vanishing


def test_real_root_counts():
    # (x - 1)(x - 2)(x + 3)
    poly = IntPolynomial.from_roots([1, 2, -3])
    assert count_real_roots(poly) == 3
    assert all_roots_real_positive(IntPolynomial.from_roots([1, 2, 5]))
    assert not all_roots_real_positive(poly)
    assert not all_roots_real_positive(IntPolynomial((1, 0, 1)))


def test_solve_and_nullspace():
    M = RationalMatrix.from_rows([[1, 2], [2, 4]])
    assert solve_rational(M, (1, 3)) is None
    x = solve_rational(M, (3, 6))
    assert M.apply(x) == (3, 6)
    kernel = nullspace(M)
    assert len(kernel) == 1
    assert M.apply(kernel[0]) == (0, 0)
    assert rank(M) == 1


def test_smith_decomposition_checks_out():
    rng = random.Random(5)
    for _ in range(30):
        n = rng.randint(1, 4)
        M = IntegerMatrix.from_rows([[rng.randint(-5, 5) for _ in range(n)] for _ in range(n)])
        smith = smith_normal_form(M)
        assert smith.check(M)
        assert smith.U @ smith.U_inverse == IntegerMatrix.identity(n)


def test_smith_invariants():
    assert smith_normal_form(IntegerMatrix.from_rows([[2, 0], [0, 3]])).invariants == (1, 6)


def test_cokernel_classes():
    classes = cokernel_classes(IntegerMatrix.from_rows([[2, 0], [0, 3]]))
    assert classes.count == 6
    assert classes.representatives[0] == (0, 0)
    assert classes.index_of((2, 3)) == 0
    assert classes.contains((4, -3))
    assert not classes.contains((1, 0))
    assert not cokernel_classes(IntegerMatrix.from_rows([[1, 1], [1, 1]])).is_finite


def test_lattice_solve():
    M = IntegerMatrix.from_rows([[2, 1], [0, 3]])
    u = lattice_solve(M, (5, 3))
    assert M.apply(u) == (5, 3)
    assert lattice_solve(M, (1, 1)) is None
