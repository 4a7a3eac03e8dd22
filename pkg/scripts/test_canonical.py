from fractions import Fraction

import pytest

from common.errors import DimensionError, FiltrationMismatch, NotInvertible, SpecFileError
from exactla.matrices import IntegerMatrix, RationalMatrix
from qpoly.multipoly import MultiPoly
from canonical.filtration import Filtration
from canonical.maps import (
    CanonicalMap,
    compose_maps,
    conjugate_map,
    invert_map,
    jacobian_at,
    linearisation,
    power_map,
    validate_canonical,
)
from canonical.words import parse_word, substitute_word, word_from_vector


def test_filtration_layout():
    filtration = Filtration((1, 5))
    assert filtration.dimension == 6
    assert filtration.offsets == (0, 1, 6)
    assert list(filtration.span(2)) == [1, 2, 3, 4, 5]
    assert filtration.level_of(3) == 2
    with pytest.raises(DimensionError):
        Filtration((2, 0))


def test_words():
    assert parse_word("s^2 e1^-1 e3^k", {"k": Fraction(3)}) == [("s", 2), ("e1", -1), ("e3", 3)]
    assert parse_word("") == []
    assert parse_word("t^0") == []
    assert substitute_word("t^c", {"c": Fraction(-1)}) == "t^-1"
    assert word_from_vector(["e1", "e2"], (0, 2)) == "e2^2"
    with pytest.raises(SpecFileError):
        parse_word("t^q")


def test_klein_generator_is_canonical(load_spec):
    group = load_spec("klein_bottle").group
    assert validate_canonical(group.generators["t"], as_group_element=True).ok


def test_identity_is_canonical():
    assert validate_canonical(CanonicalMap.identity(Filtration((2, 1))), as_group_element=True).ok


def test_later_level_dependence_is_reported():
    filtration = Filtration((1, 1))
    x1, x2 = MultiPoly.variable(2, 0), MultiPoly.variable(2, 1)
    report = validate_canonical(CanonicalMap(filtration, [x1 + x2, x2]))
    assert not report.ok
    assert report.first().level == 1
    assert report.first().variable == 1


def test_non_unimodular_block_is_not_a_group_element():
    filtration = Filtration((1,))
    doubling = CanonicalMap.from_levels(filtration, [IntegerMatrix.from_rows([[2]])])
    assert validate_canonical(doubling).ok
    assert not validate_canonical(doubling, as_group_element=True).ok


def test_compose_with_identity(load_spec):
    group = load_spec("heisenberg_nil").group
    a = group.generators["a"]
    assert compose_maps(group.identity, a) == a
    assert compose_maps(a, group.identity) == a


def test_klein_relation(load_spec):
    """t z t^-1 = z^-1"""
    group = load_spec("klein_bottle").group
    t, z = group.generators["t"], group.generators["z"]
    conjugated = conjugate_map(t, z)
    assert conjugated == power_map(z, -1)
    assert conjugated.translation_at(2) == (-1,)


def test_conjugation_moves_e1_by_A(load_spec):
    group = load_spec("big_example").group
    moved = conjugate_map(group.generators["s"], group.generators["e1"])
    assert moved.translation_at(2) == (-1, 0, 0, 0, 0)
    assert moved.translation_at(1) == (0,)


def test_affine_inverse():
    """x -> 2x + 1 inverts to x -> (x - 1)/2"""
    filtration = Filtration((1,))
    f = CanonicalMap.from_levels(filtration, [IntegerMatrix.from_rows([[2]])], [[MultiPoly.constant(1, 1)]])
    inverse = invert_map(f)
    assert inverse.components[0] == MultiPoly.linear([Fraction(1, 2)], Fraction(-1, 2))
    assert compose_maps(f, inverse).is_identity()
    assert invert_map(CanonicalMap.identity(filtration)).is_identity()


def test_klein_generator_inverse(load_spec):
    group = load_spec("klein_bottle").group
    inverse = invert_map(group.generators["t"])
    assert inverse((Fraction(3), Fraction(5))) == (2, -5)
    assert compose_maps(group.generators["t"], inverse).is_identity()


def test_polynomial_inverse(load_spec):
    group = load_spec("heisenberg_nil").group
    a = group.generators["a"]
    assert compose_maps(invert_map(a), a).is_identity()
    assert compose_maps(a, invert_map(a)).is_identity()


def test_singular_block_is_not_invertible():
    filtration = Filtration((1, 1))
    f = CanonicalMap.from_levels(filtration, [None, RationalMatrix.from_rows([[0]])])
    with pytest.raises(NotInvertible) as excinfo:
        invert_map(f)
    assert excinfo.value.level == 2


def test_powers(load_spec):
    group = load_spec("klein_bottle").group
    t = group.generators["t"]
    assert power_map(t, 0).is_identity()
    assert power_map(t, -1) == invert_map(t)
    assert power_map(t, 3) == compose_maps(t, compose_maps(t, t))
    assert group.element("t^2").translation_at(1) == (2,)
    assert group.element("t^2").block(2) == IntegerMatrix.identity(1)


def test_filtration_mismatch():
    with pytest.raises(FiltrationMismatch):
        compose_maps(CanonicalMap.identity(Filtration((1,))), CanonicalMap.identity(Filtration((1, 1))))


def test_linearisation_and_jacobian(load_spec):
    spec = load_spec("heisenberg_nil")
    blocks = linearisation(spec.endo.lift)
    assert [b[0, 0] for b in blocks] == [2, 3, 6]
    J = jacobian_at(spec.endo.lift, (1, 0, 0))
    assert J == RationalMatrix.from_rows([[2, 0, 0], [0, 3, 0], [6, 0, 6]])


def test_filtered_view_decomposes_elements(load_spec):
    group = load_spec("big_example").group
    view = group.view()
    element = group.element("s^3 e2 e5^-2")
    assert view.contains(element)
    assert view.decompose(element)[0] == (3,)
    assert view.coset_index(element) == 0


def test_top_quotient_cosets(load_spec):
    group = load_spec("big_example_product").group
    view = group.view()
    assert view.coset_index(group.element("s^3 w")) == 1
    assert view.coset_index(group.element("s^2 w^-1 e3")) == 0
