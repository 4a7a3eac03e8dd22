"""Fixed points of canonical-type maps and their count on the quotient.

A canonical-type map is solved level by level: given the earlier levels,
level i is the linear system ``(I - D_i) x_i = tail_i(x_1, ..., x_{i-1})``.
A singular level either has no solution or leaves a kernel of freedom,
which is what separates Empty from PositiveDimensional. For nonlinear
maps the kernel coordinates stay symbolic: later levels turn into
polynomial constraints on them, decided exactly with sympy.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import sympy

from common.counts import is_finite
from common.errors import InconsistentResult, StructuralError
from exactla.matrices import RationalMatrix, det_i_minus, nullspace, solve_rational
from canonical.maps import compose_maps
from nielsen.formulas import DEFAULT_SUBGROUP, nielsen_average_invariant, resolve_subgroup
from reidemeister.classes import TwistedClasses

logger = logging.getLogger(__name__)

EMPTY = "Empty"
UNIQUE = "Unique"
POSITIVE_DIMENSIONAL = "PositiveDimensional"


@dataclass
class FixSetStructure:
    kind: str
    point: tuple = None
    first_degenerate_level: int = None
    kernel_basis: list = field(default_factory=list)
    last_degenerate_level: int = None
    last_kernel_basis: list = field(default_factory=list)
    fmap: object = field(default=None, repr=False, compare=False)
    parametrization: tuple = field(default=None, repr=False, compare=False)

    @property
    def is_empty(self):
        return self.kind == EMPTY

    @property
    def is_unique(self):
        return self.kind == UNIQUE

    @property
    def is_positive_dimensional(self):
        return self.kind == POSITIVE_DIMENSIONAL

    def second_point(self, shift=1):
        """Another fixed point: move the last degenerate level along its kernel, re-solve below."""
        if not self.is_positive_dimensional:
            raise ValueError(f"{self.kind} fixed-point sets have no second point")
        if self.parametrization is not None:
            coordinates, assignment, last_params = self.parametrization
            values = dict(assignment)
            values[last_params[0]] = values[last_params[0]] + shift
            return tuple(_exact(e.subs(values)) for e in coordinates)
        f = self.fmap
        filtration = f.filtration
        m = self.last_degenerate_level
        r = self.last_kernel_basis[0]
        x = list(self.point)
        for offset, i in enumerate(filtration.span(m)):
            x[i] = x[i] + Fraction(shift) * r[offset]
        for level in range(m + 1, filtration.levels + 1):
            solved = _solve_level(f, level, x)
            if solved is None or solved[1]:
                raise InconsistentResult(f"level {level} below the last degenerate level is not uniquely solvable")
            for offset, i in enumerate(filtration.span(level)):
                x[i] = solved[0][offset]
        return tuple(x)

    def to_json(self):
        out = {"kind": self.kind}
        if self.point is not None:
            out["point"] = [str(c) for c in self.point]
        if self.is_positive_dimensional:
            out["first_degenerate_level"] = self.first_degenerate_level
            out["kernel_basis"] = [[str(c) for c in v] for v in self.kernel_basis]
        return out


def _solve_level(f, level, x):
    """Particular solution of the level system and its kernel, or None if inconsistent."""
    block = f.block(level)
    k = block.rows
    lhs = RationalMatrix.identity(k) - block
    rhs = [t.evaluate(tuple(x)) for t in f.tail(level)]
    solution = solve_rational(lhs, rhs)
    if solution is None:
        return None
    return solution, nullspace(lhs)


def _degenerate_levels(f):
    levels = []
    for level in range(1, f.filtration.levels + 1):
        block = f.block(level)
        if det_i_minus(block) == 0:
            levels.append((level, nullspace(RationalMatrix.identity(block.rows) - block)))
    return levels


def _positive_dimensional(f, point, degenerate):
    (first, first_kernel), (last, last_kernel) = degenerate[0], degenerate[-1]
    return FixSetStructure(
        POSITIVE_DIMENSIONAL, tuple(point), first, first_kernel, last, last_kernel, fmap=f,
    )


def _rational(value):
    value = Fraction(value)
    return sympy.Rational(value.numerator, value.denominator)


def _exact(value):
    value = sympy.simplify(value)
    if value.is_Rational:
        return Fraction(int(value.p), int(value.q))
    return value


def _poly_expr(poly, xs):
    total = sympy.Integer(0)
    for exponent, c in poly.terms():
        term = _rational(c)
        for x, k in zip(xs, exponent):
            if k:
                term = term * x ** k
        total = total + term
    return sympy.expand(total)


def _parametric_solution(f):
    """Fixed points as expressions in kernel parameters, with the constraints those parameters must meet.

    Returns ``(coordinates, params, constraints, last_params)``; ``last_params``
    belong to the last degenerate level and are never constrained.
    """
    h = f.filtration.dimension
    xs, params, constraints, last_params = [], [], [], []
    for level in range(1, f.filtration.levels + 1):
        block = f.block(level)
        lhs = sympy.eye(block.rows) - sympy.Matrix([[_rational(v) for v in row] for row in block.to_rows()])
        padded = xs + [sympy.Integer(0)] * (h - len(xs))
        rhs = sympy.Matrix([_poly_expr(t, padded) for t in f.tail(level)])
        for c in lhs.T.nullspace():
            condition = sympy.expand((c.T * rhs)[0])
            if condition != 0:
                constraints.append(condition)
        y = lhs.pinv() * rhs
        kernel = lhs.nullspace()
        fresh = [sympy.Symbol(f"t{len(params) + j}", real=True) for j in range(len(kernel))]
        for t, v in zip(fresh, kernel):
            y = y + t * v
        if fresh:
            last_params = fresh
        params.extend(fresh)
        xs.extend(sympy.expand(e) for e in y)
    return xs, params, constraints, last_params


def _real_assignment(constraints, params, trials=(0, 1, -1, 2, -2)):
    """Real parameter values meeting every constraint, or None when there are none.

    Raises StructuralError when sympy cannot settle the question.
    """
    if not constraints:
        return {p: sympy.Integer(0) for p in params}
    if any(c.is_number for c in constraints):
        return None
    unknowns = sorted(set().union(*(c.free_symbols for c in constraints)), key=str)
    try:
        solutions = sympy.solve(constraints, unknowns, dict=True)
    except NotImplementedError as e:
        raise StructuralError(f"fixed-point constraints {constraints} could not be decided") from e
    if not solutions:
        return None
    for solution in solutions:
        free = [s for s in unknowns if s not in solution]
        for choice in product(trials, repeat=len(free)):
            values = {s: sympy.Integer(v) for s, v in zip(free, choice)}
            values.update({s: sympy.simplify(v.subs(values)) for s, v in solution.items()})
            if not all(v.is_real for v in values.values()):
                continue
            if all(sympy.simplify(c.subs(values)) == 0 for c in constraints):
                assignment = {p: sympy.Integer(0) for p in params}
                assignment.update(values)
                return assignment
    raise StructuralError(f"no real point found on the fixed-point constraints {constraints}")


def _solve_nonlinear(f, degenerate):
    coordinates, params, constraints, last_params = _parametric_solution(f)
    assignment = _real_assignment(constraints, params)
    if assignment is None:
        logger.debug(f"fixed-point constraints {constraints} have no real solution")
        return FixSetStructure(EMPTY, fmap=f)
    point = tuple(_exact(e.subs(assignment)) for e in coordinates)
    if not params:
        return FixSetStructure(UNIQUE, point, fmap=f)
    structure = _positive_dimensional(f, point, degenerate)
    structure.parametrization = (coordinates, assignment, last_params)
    return structure


def solve_fixed_points(f):
    """Empty, Unique(point) or PositiveDimensional for a canonical-type map."""
    degenerate = _degenerate_levels(f)
    if not f.is_affine():
        return _solve_nonlinear(f, degenerate)
    matrix, vector = f.affine_parts()
    lhs = RationalMatrix.identity(matrix.rows) - matrix
    point = solve_rational(lhs, vector)
    if point is None:
        return FixSetStructure(EMPTY, fmap=f)
    if not degenerate:
        return FixSetStructure(UNIQUE, tuple(point), fmap=f)
    return _positive_dimensional(f, point, degenerate)


@dataclass
class FixedCount:
    finite: bool
    count: int = None
    structures: list = field(default_factory=list)
    searched_radius: int = None

    @property
    def bounded_search(self):
        return self.searched_radius is not None

    def __str__(self):
        if self.bounded_search:
            return f"none found within radius {self.searched_radius}"
        return f"Finite({self.count})" if self.finite else "Uncountable"


def _level_words(view, radius):
    """Products of level elements with total exponent at most ``radius``."""
    sizes = [len(words) for words in view.level_words]
    total = sum(sizes)
    vectors = [
        e for e in product(range(-radius, radius + 1), repeat=total)
        if sum(abs(x) for x in e) <= radius
    ]
    for e in sorted(vectors, key=lambda e: (sum(abs(x) for x in e), e)):
        element = view.group.identity
        start = 0
        for level, size in enumerate(sizes, start=1):
            part = e[start:start + size]
            start += size
            if any(part):
                element = compose_maps(element, view.level_element(level, part))
        yield element


def count_fixed_points_on_quotient(group, endo, subgroup=DEFAULT_SUBGROUP, search_radius=2, word_bound=3):
    """Fixed points of the induced map on the quotient: Finite(N(f)) or Uncountable."""
    nielsen = nielsen_average_invariant(group, endo, subgroup, word_bound)
    counter = TwistedClasses(group.view(), endo)
    classes = counter.result()
    if is_finite(classes.count):
        structures = []
        for rep in classes.representatives:
            structure = solve_fixed_points(compose_maps(rep, endo.lift))
            structures.append(structure)
            if structure.is_positive_dimensional:
                logger.info("✅ a twisted class has a positive-dimensional fixed set: uncountably many")
                return FixedCount(False, structures=structures)
        count = sum(1 for s in structures if s.is_unique)
        if count != nielsen.value:
            raise InconsistentResult(f"{count} fixed points but N(f) = {nielsen.value}")
        logger.info(f"✅ {count} fixed points, one per essential class")
        return FixedCount(True, count, structures)

    view = group.view()
    structures = []
    found_unique = False
    for word in resolve_subgroup(group, subgroup).coset_reps:
        alpha = group.element(word)
        for k in _level_words(view, search_radius):
            structure = solve_fixed_points(compose_maps(compose_maps(k, alpha), endo.lift))
            structures.append(structure)
            if structure.is_positive_dimensional:
                logger.info("✅ R(f) is infinite and a lift has a positive-dimensional fixed set")
                return FixedCount(False, structures=structures)
            found_unique = found_unique or structure.is_unique
    if not found_unique and nielsen.value == 0:
        logger.warning(
            f"⚠️ R(f) is infinite and no searched lift within radius {search_radius} has a fixed point; reporting none found"
        )
        return FixedCount(True, 0, structures, searched_radius=search_radius)
    raise StructuralError(
        f"R(f) is infinite but no positive-dimensional fixed set was found within radius {search_radius}"
    )
