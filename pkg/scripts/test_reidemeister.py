import random

import pytest

from common.counts import INFINITE
from common.errors import HypothesisViolation
from exactla.matrices import IntegerMatrix, det_i_minus
from exactla.smith import cokernel_classes
from canonical.group import GroupSpec
from canonical.maps import compose_maps, invert_map
from reidemeister.classes import (
    TwistedClasses,
    UnionFind,
    brute_force_coker,
    check_addition_inequality,
    class_index,
    reidemeister_abelian,
    reidemeister_filtered,
)


def test_abelian_counts():
    assert reidemeister_abelian(IntegerMatrix.from_rows([[2, 0], [0, 3]])).count == 2
    assert reidemeister_abelian(IntegerMatrix.identity(2)).count is INFINITE
    doubling = reidemeister_abelian(IntegerMatrix.from_rows([[2]]))
    assert doubling.count == 1
    assert doubling.representatives == [(0,)]


def test_union_find_keeps_smallest_root():
    uf = UnionFind(5)
    uf.union(3, 1)
    uf.union(4, 3)
    assert uf.find(4) == 1
    assert uf.roots() == [0, 1, 2]


def test_brute_force_agrees_with_smith_on_random_matrices():
    """100 random 2x2 and 3x3 matrices with entries in [-3, 3]"""
    rng = random.Random(20240601)
    checked = 0
    while checked < 100:
        n = rng.choice([2, 3])
        F = IntegerMatrix.from_rows([[rng.randint(-3, 3) for _ in range(n)] for _ in range(n)])
        M = IntegerMatrix.identity(n) - F
        classes = cokernel_classes(M)
        if not classes.is_finite:
            continue
        checked += 1
        result = reidemeister_abelian(F)
        assert result.count == brute_force_coker(M)
        reps = result.representatives
        for i in range(len(reps)):
            for j in range(i + 1, len(reps)):
                assert not classes.contains(tuple(a - b for a, b in zip(reps[i], reps[j])))


def test_brute_force_needs_a_large_enough_box():
    with pytest.raises(ValueError):
        brute_force_coker(IntegerMatrix.from_rows([[7]]), box_radius=3)
    with pytest.raises(ValueError):
        brute_force_coker(IntegerMatrix.from_rows([[1, 1], [1, 1]]))


def test_brute_force_on_the_six_dimensional_example(matrix_A, matrix_B):
    """k = -2: the two cosets contribute 9 and 3 classes"""
    I5 = IntegerMatrix.identity(5)
    B = matrix_B(-2)
    total = brute_force_coker(I5 - B) + brute_force_coker(I5 - matrix_A @ B)
    assert total == 12


def test_klein_bottle_counts(load_spec):
    spec = load_spec("klein_bottle", a=2, c=3)
    result = reidemeister_filtered(spec.group, spec.endo)
    assert result.count == 4
    assert len(result.representatives) == 4
    inverse = load_spec("klein_bottle", a=-1, c=-1)
    assert reidemeister_filtered(inverse.group, inverse.endo).count is INFINITE


def test_identity_endomorphism_has_infinitely_many_classes(load_spec):
    spec = load_spec("klein_bottle", a=1, c=1)
    assert reidemeister_filtered(spec.group, spec.endo).count is INFINITE


@pytest.mark.parametrize("k, expected", [(0, 6), (2, 12), (3, 18), (-2, 12)])
def test_six_dimensional_example(load_spec, k, expected):
    spec = load_spec("big_example", k=k)
    assert reidemeister_filtered(spec.group, spec.endo).count == expected


def test_nonlinear_tail_example(load_spec):
    spec = load_spec("heisenberg_nil")
    assert reidemeister_filtered(spec.group, spec.endo).count == 10


def test_non_integral_level_matrix_is_refused(load_spec):
    spec = load_spec("big_example_product")
    with pytest.raises(HypothesisViolation):
        reidemeister_filtered(spec.group, spec.endo)


def test_finite_top_quotient_is_merged(load_spec):
    """The Klein bottle group seen through <t^2, z> with top cosets 1 and t"""
    spec = load_spec("klein_bottle", a=2, c=3)
    base = spec.group
    group = GroupSpec(base.filtration, base.generators, [["t^2"], ["z"]], top_reps=("", "t"))
    counter = TwistedClasses(group.view(), spec.endo)
    assert len(counter.candidates()) == 8
    assert counter.result().count == 4


def test_class_index_is_twisted_conjugation_invariant(load_spec):
    spec = load_spec("klein_bottle", a=2, c=3)
    group, endo = spec.group, spec.endo
    counter = TwistedClasses(group.view(), endo)
    representatives = counter.result().representatives
    for i, rep in enumerate(representatives):
        assert counter.class_index(rep) == i
    rng = random.Random(7)
    for _ in range(20):
        alpha = group.element(f"t^{rng.randint(-3, 3)} z^{rng.randint(-3, 3)}")
        word = f"z^{rng.randint(-2, 2)} t^{rng.randint(-2, 2)}"
        gamma = group.element(word)
        moved = compose_maps(compose_maps(gamma, alpha), invert_map(endo.image(group, word)))
        assert class_index(group, endo, moved) == class_index(group, endo, alpha)


def test_addition_inequality(load_spec):
    spec = load_spec("klein_bottle", a=2, c=3)
    outcome = check_addition_inequality(spec.group, "K", spec.endo)
    assert outcome.ok
    assert outcome.left == 4
    assert outcome.right == 8


TWIST_CASES = [
    ("klein_bottle", {"a": 2, "c": 3}, ["t", "z"]),
    ("big_example", {"k": 2}, ["s", "e1", "e2", "e3", "e4", "e5"]),
]


def random_word(rng, names, length=3):
    return " ".join(f"{rng.choice(names)}^{rng.choice([-2, -1, 1, 2])}" for _ in range(length))


@pytest.mark.parametrize("name, params, letters", TWIST_CASES)
def test_count_is_unchanged_by_inner_twists(load_spec, name, params, letters):
    spec = load_spec(name, **params)
    expected = reidemeister_filtered(spec.group, spec.endo).count
    rng = random.Random(41)
    for _ in range(5):
        g = spec.group.element(random_word(rng, letters))
        assert reidemeister_filtered(spec.group, spec.endo.twisted_by(g)).count == expected


@pytest.mark.parametrize("name, params, letters", TWIST_CASES)
def test_finite_count_has_no_degenerate_level(load_spec, name, params, letters):
    """det(I - A_i(α) F_i) != 0 at every level for representatives and random α"""
    spec = load_spec(name, **params)
    group = spec.group
    view = group.view()
    result = reidemeister_filtered(group, spec.endo)
    assert result.is_finite
    rng = random.Random(42)
    elements = list(result.representatives) + [group.element(random_word(rng, letters)) for _ in range(5)]
    for alpha in elements:
        twisted = spec.endo.twisted_by(alpha)
        for level in range(1, view.levels + 1):
            assert det_i_minus(twisted.level_matrix(view, level)) != 0
