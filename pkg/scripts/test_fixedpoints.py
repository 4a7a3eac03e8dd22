from fractions import Fraction

import pytest
import sympy

from exactla.matrices import IntegerMatrix
from qpoly.multipoly import MultiPoly
from canonical.filtration import Filtration
from canonical.group import EndoSpec
from canonical.maps import CanonicalMap, compose_maps
from fixedpoints.solver import (
    EMPTY,
    POSITIVE_DIMENSIONAL,
    UNIQUE,
    count_fixed_points_on_quotient,
    solve_fixed_points,
)


def _flip_and_shift():
    """(r1, r2) -> (r1, -r2 + 1)"""
    filtration = Filtration((1, 1))
    return CanonicalMap.from_levels(
        filtration, [None, IntegerMatrix.from_rows([[-1]])], [None, [MultiPoly.constant(2, 1)]],
    )


def test_doubling_has_a_unique_fixed_point():
    f = CanonicalMap.from_levels(Filtration((1,)), [IntegerMatrix.from_rows([[2]])])
    structure = solve_fixed_points(f)
    assert structure.kind == UNIQUE
    assert structure.point == (0,)


def test_translation_has_no_fixed_point():
    f = CanonicalMap.translation(Filtration((1,)), [[1]])
    assert solve_fixed_points(f).kind == EMPTY


def test_flip_has_a_line_of_fixed_points():
    f = _flip_and_shift()
    structure = solve_fixed_points(f)
    assert structure.kind == POSITIVE_DIMENSIONAL
    assert structure.first_degenerate_level == 1
    assert f(structure.point) == structure.point
    second = structure.second_point()
    assert second != structure.point
    assert f(second) == second
    assert structure.to_json()["kind"] == POSITIVE_DIMENSIONAL


def test_second_point_needs_a_positive_dimensional_set():
    f = CanonicalMap.from_levels(Filtration((1,)), [IntegerMatrix.from_rows([[2]])])
    with pytest.raises(ValueError):
        solve_fixed_points(f).second_point()


def test_nonlinear_unique_fixed_point(load_spec):
    spec = load_spec("heisenberg_nil")
    f = compose_maps(spec.group.element("a b^-1 c^2"), spec.endo.lift)
    structure = solve_fixed_points(f)
    assert structure.is_unique
    assert f(structure.point) == structure.point


def test_nonlinear_inconsistent_level_is_empty():
    """(x1, x2 + x1^2 + 1) has no fixed point"""
    filtration = Filtration((1, 1))
    x1 = MultiPoly.variable(2, 0)
    f = CanonicalMap.from_levels(filtration, tails=[None, [x1 * x1 + 1]])
    assert solve_fixed_points(f).is_empty


def test_klein_lift_with_infinite_fix(load_spec):
    spec = load_spec("klein_bottle", a=-1, c=-1)
    f = compose_maps(spec.group.element("t"), spec.endo.lift)
    structure = solve_fixed_points(f)
    assert structure.is_positive_dimensional
    assert structure.first_degenerate_level == 2
    assert structure.point[0] == Fraction(1, 2)


def test_klein_bottle_fixed_points_equal_nielsen(load_spec):
    spec = load_spec("klein_bottle", a=2, c=3)
    outcome = count_fixed_points_on_quotient(spec.group, spec.endo)
    assert outcome.finite
    assert outcome.count == 4
    assert str(outcome) == "Finite(4)"


def test_klein_bottle_with_infinite_reidemeister_is_uncountable(load_spec):
    spec = load_spec("klein_bottle", a=-1, c=-1)
    assert str(count_fixed_points_on_quotient(spec.group, spec.endo)) == "Uncountable"


def test_identity_is_uncountable(circle_map):
    group, endo = circle_map(1)
    outcome = count_fixed_points_on_quotient(group, endo)
    assert not outcome.finite
    assert str(outcome) == "Uncountable"


def test_doubling_map_on_the_circle(circle_map):
    group, endo = circle_map(2)
    assert str(count_fixed_points_on_quotient(group, endo)) == "Finite(1)"


def test_cubic_tail_fixed_points(load_spec):
    spec = load_spec("heisenberg_nil")
    assert count_fixed_points_on_quotient(spec.group, spec.endo).count == 10


def test_nonlinear_fixed_points_off_the_zero_kernel_choice():
    """(x1, x2 + x1^2 - 1) fixes the lines x1 = 1 and x1 = -1"""
    filtration = Filtration((1, 1))
    x1 = MultiPoly.variable(2, 0)
    f = CanonicalMap.from_levels(filtration, tails=[None, [x1 * x1 - 1]])
    assert f((1, 0)) == (1, 0)
    structure = solve_fixed_points(f)
    assert structure.is_positive_dimensional
    assert structure.point[0] in (1, -1)
    assert f(structure.point) == structure.point
    second = structure.second_point()
    assert second != structure.point
    assert f(second) == second


def test_nonlinear_fixed_points_through_a_lower_level():
    """(x1, 2 x2 + x1, x3 + x2^2 - 1): x2 = -x1 forces x1 = 1 or -1"""
    filtration = Filtration((1, 1, 1))
    x1 = MultiPoly.variable(3, 0)
    x2 = MultiPoly.variable(3, 1)
    f = CanonicalMap.from_levels(
        filtration,
        [None, IntegerMatrix.from_rows([[2]]), None],
        [None, [x1], [x2 * x2 - 1]],
    )
    structure = solve_fixed_points(f)
    assert structure.is_positive_dimensional
    assert abs(structure.point[0]) == 1
    assert f(structure.point) == structure.point


def test_nonlinear_fixed_points_at_irrational_coordinates():
    filtration = Filtration((1, 1))
    x1 = MultiPoly.variable(2, 0)
    f = CanonicalMap.from_levels(filtration, tails=[None, [x1 * x1 - 2]])
    structure = solve_fixed_points(f)
    assert structure.is_positive_dimensional
    assert sympy.simplify(structure.point[0] ** 2 - 2) == 0


def test_free_rotation_reports_a_bounded_search(circle_map):
    """x -> x + 1/2 on the circle: N(f) = 0, R(f) infinite, no lift has a fixed point"""
    group, endo = circle_map(1)
    rotation = EndoSpec(CanonicalMap.translation(group.filtration, [[Fraction(1, 2)]]), endo.images)
    outcome = count_fixed_points_on_quotient(group, rotation, search_radius=1)
    assert outcome.bounded_search
    assert outcome.count == 0
    assert str(outcome) == "none found within radius 1"
    assert all(s.is_empty for s in outcome.structures)
