import random
from fractions import Fraction

import numpy as np
import pytest

from common.errors import ArityError
from qpoly.multipoly import (
    MultiPoly,
    compose,
    evaluate_vector,
    finite_difference_jacobian,
    identity_vector,
    jacobian,
    jacobian_matrix_at,
)


def random_poly(rng, num_vars, degree=2, terms=4):
    poly = MultiPoly.zero(num_vars)
    for _ in range(terms):
        exponent = [0] * num_vars
        for _ in range(rng.randint(0, degree)):
            exponent[rng.randrange(num_vars)] += 1
        poly = poly + MultiPoly(num_vars, {tuple(exponent): Fraction(rng.randint(-4, 4), rng.randint(1, 3))})
    return poly


def random_point(rng, num_vars):
    return tuple(Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(num_vars))


def test_difference_of_squares():
    x1 = MultiPoly.variable(1, 0)
    assert (x1 + 1) * (x1 - 1) == x1 ** 2 - 1
    assert ((x1 + 1) * (x1 - 1)).coefficient((1,)) == 0


def test_rational_scaling_multiplies_out():
    x1, x2 = MultiPoly.variable(2, 0), MultiPoly.variable(2, 1)
    product = (Fraction(1, 2) * x1) * (Fraction(2, 3) * x2)
    assert product == MultiPoly(2, {(1, 1): Fraction(1, 3)})
    assert product.terms() == [((1, 1), Fraction(1, 3))]


def test_zero_coefficients_are_dropped():
    x = MultiPoly.variable(2, 0)
    assert (x - x).is_zero()
    assert MultiPoly(2, {(1, 0): 0, (0, 0): 3}) == 3


def test_mixed_arity_is_refused():
    with pytest.raises(ArityError):
        MultiPoly.variable(2, 0) + MultiPoly.variable(3, 0)
    with pytest.raises(ArityError):
        compose([MultiPoly.variable(2, 0)], identity_vector(3))


def test_composition_is_associative():
    rng = random.Random(11)
    for _ in range(10):
        f = [random_poly(rng, 2) for _ in range(2)]
        g = [random_poly(rng, 2) for _ in range(2)]
        h = [random_poly(rng, 2, degree=1) for _ in range(2)]
        assert compose(f, compose(g, h)) == compose(compose(f, g), h)


def test_composition_evaluates_as_nested_calls():
    rng = random.Random(12)
    for _ in range(20):
        f = [random_poly(rng, 3) for _ in range(3)]
        g = [random_poly(rng, 3) for _ in range(3)]
        x = random_point(rng, 3)
        assert evaluate_vector(compose(f, g), x) == evaluate_vector(f, evaluate_vector(g, x))


def test_identity_is_neutral_for_composition():
    rng = random.Random(13)
    f = [random_poly(rng, 3) for _ in range(3)]
    assert compose(f, identity_vector(3)) == f
    assert compose(identity_vector(3), f) == f


def test_jacobian_of_a_quadratic_map():
    x1, x2 = MultiPoly.variable(2, 0), MultiPoly.variable(2, 1)
    vector = [x1 * x2, x1 ** 2 + 3 * x2]
    assert jacobian(vector) == [[x2, x1], [2 * x1, MultiPoly.constant(2, 3)]]
    at = jacobian_matrix_at(vector, (Fraction(1, 2), 2))
    assert at.to_rows() == [[2, Fraction(1, 2)], [1, 3]]


def test_exact_jacobian_matches_finite_differences():
    rng = random.Random(14)
    for _ in range(10):
        vector = [random_poly(rng, 3, degree=3) for _ in range(3)]
        point = random_point(rng, 3)
        exact = np.array([[float(v) for v in row] for row in jacobian_matrix_at(vector, point).to_rows()])
        assert np.allclose(exact, finite_difference_jacobian(vector, point), atol=1e-4)
