"""Canonical-type polynomial maps of R^h.

A map is stored as its h component polynomials; the diagonal blocks D_i
and the tails are read off from them. At level i a canonical-type map
looks like ``x_i -> D_i x_i + q_i(x_1, ..., x_{i-1})``.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from common.errors import DimensionError, FiltrationMismatch, NotInvertible, StructuralError
from exactla.matrices import RationalMatrix, det
from qpoly.multipoly import (
    MultiPoly,
    compose,
    evaluate_vector,
    identity_vector,
    jacobian_matrix_at,
)

logger = logging.getLogger(__name__)


class CanonicalMap:
    def __init__(self, filtration, components):
        components = tuple(components)
        h = filtration.dimension
        if len(components) != h:
            raise DimensionError(f"{len(components)} components for dimension {h}")
        for p in components:
            if p.num_vars != h:
                raise DimensionError(f"component in {p.num_vars} variables for dimension {h}")
        self.filtration = filtration
        self.components = components

    # construction -------------------------------------------------------

    @classmethod
    def identity(cls, filtration):
        return cls(filtration, identity_vector(filtration.dimension))

    @classmethod
    def from_levels(cls, filtration, blocks=None, tails=None):
        """Build ``x_i -> blocks[i] x_i + tails[i]`` level by level.

        ``blocks[i]`` may be ``None`` (identity); ``tails[i]`` is a list of
        k_i polynomials (in h or in K_{i-1} variables), or ``None``.
        """
        h = filtration.dimension
        x = identity_vector(h)
        components = []
        for level in range(1, filtration.levels + 1):
            span = filtration.span(level)
            k = len(span)
            block = blocks[level - 1] if blocks and blocks[level - 1] is not None \
                else RationalMatrix.identity(k)
            if block.shape != (k, k):
                raise DimensionError(f"level {level} block is {block.shape}, expected {(k, k)}")
            tail = tails[level - 1] if tails and tails[level - 1] is not None \
                else [MultiPoly.zero(h)] * k
            if len(tail) != k:
                raise DimensionError(f"level {level} tail has {len(tail)} entries, expected {k}")
            for r in range(k):
                row = MultiPoly.zero(h)
                for c in range(k):
                    if block[r, c]:
                        row = row + x[span[c]] * block[r, c]
                t = tail[r]
                if not isinstance(t, MultiPoly):
                    t = MultiPoly.constant(h, t)
                components.append(row + t.extend(h))
        return cls(filtration, components)

    @classmethod
    def translation(cls, filtration, vectors):
        """Pure translation, ``vectors[i]`` added at level i+1."""
        h = filtration.dimension
        tails = [[MultiPoly.constant(h, c) for c in v] for v in vectors]
        return cls.from_levels(filtration, tails=tails)

    @classmethod
    def affine(cls, filtration, matrix, vector):
        """``x -> matrix @ x + vector`` (the caller guarantees block-triangularity)."""
        h = filtration.dimension
        components = [
            MultiPoly.linear(matrix.row(i), vector[i]) if h else MultiPoly.zero(0)
            for i in range(h)
        ]
        return cls(filtration, components)

    # inspection ---------------------------------------------------------

    def block(self, level):
        """Diagonal block D_level, read from the own-level linear coefficients."""
        span = self.filtration.span(level)
        entries = []
        for r in span:
            linear = self.components[r].linear_part()
            entries.extend(linear[c] for c in span)
        k = len(span)
        matrix = RationalMatrix(k, k, entries)
        return matrix.to_integer() if matrix.is_integral() else matrix

    def tail(self, level):
        """Level components minus their own-level linear part."""
        span = self.filtration.span(level)
        h = self.filtration.dimension
        block = self.block(level)
        x = identity_vector(h)
        out = []
        for r_local, r in enumerate(span):
            own = MultiPoly.zero(h)
            for c_local, c in enumerate(span):
                if block[r_local, c_local]:
                    own = own + x[c] * block[r_local, c_local]
            out.append(self.components[r] - own)
        return out

    def translation_at(self, level):
        """Constant terms of the level's components."""
        return tuple(self.components[r].constant_term for r in self.filtration.span(level))

    def level_components(self, level):
        return tuple(self.components[r] for r in self.filtration.span(level))

    def is_affine(self):
        return all(p.is_affine() for p in self.components)

    def affine_parts(self):
        """``(M, b)`` with ``f(x) = M x + b``; only for affine maps."""
        if not self.is_affine():
            raise StructuralError("map is not affine")
        h = self.filtration.dimension
        matrix = RationalMatrix.from_rows([p.linear_part() for p in self.components]) if h \
            else RationalMatrix(0, 0, ())
        return matrix, tuple(p.constant_term for p in self.components)

    def acts_trivially_above(self, level):
        """True when every level before ``level`` is mapped identically."""
        x = identity_vector(self.filtration.dimension)
        upto = self.filtration.lower(level)
        return all(self.components[r] == x[r] for r in range(upto))

    def is_level_translation(self, level):
        """True for ``x_j -> x_j`` above ``level`` and ``x_level -> x_level + t`` at it."""
        if not self.acts_trivially_above(level):
            return False
        x = identity_vector(self.filtration.dimension)
        return all((self.components[r] - x[r]).is_constant() for r in self.filtration.span(level))

    def is_identity(self):
        return self.components == tuple(identity_vector(self.filtration.dimension))

    def evaluate(self, point):
        return evaluate_vector(self.components, tuple(Fraction(v) for v in point))

    def __call__(self, point):
        return self.evaluate(point)

    def __eq__(self, other):
        if not isinstance(other, CanonicalMap):
            return NotImplemented
        return self.filtration == other.filtration and self.components == other.components

    def __hash__(self):
        return hash((self.filtration, self.components))

    def __repr__(self):
        return f"CanonicalMap({self.filtration.block_dims}, {self.format()})"

    def format(self, names=None):
        return "(" + ", ".join(p.format(names) for p in self.components) + ")"

    @cached_property
    def inverse(self):
        return _invert(self)


@dataclass(frozen=True)
class Violation:
    level: int
    variable: object
    reason: str

    def __str__(self):
        where = f"level {self.level}"
        if self.variable is not None:
            where += f", variable x{self.variable + 1}"
        return f"{where}: {self.reason}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple = ()

    @property
    def ok(self):
        return not self.violations

    def __bool__(self):
        return self.ok

    def first(self):
        return self.violations[0] if self.violations else None


def validate_canonical(f, as_group_element=False, integer_translations=False):
    """Check the canonical-type shape of ``f`` and collect every violation."""
    violations = []
    filtration = f.filtration
    for level in range(1, filtration.levels + 1):
        span = filtration.span(level)
        for r in span:
            for exponent, _ in f.components[r].terms():
                for var, power in enumerate(exponent):
                    if not power:
                        continue
                    var_level = filtration.level_of(var)
                    if var_level > level:
                        violations.append(Violation(level, var, "depends on a later level"))
                    elif var_level == level and sum(exponent) != 1:
                        violations.append(Violation(level, var, "own-level variable enters nonlinearly"))
        if as_group_element:
            block = f.block(level)
            if not block.is_integral() or abs(det(block)) != 1:
                violations.append(Violation(level, None, f"diagonal block {block} is not in GL(k, Z)"))
        if integer_translations:
            if any(Fraction(c).denominator != 1 for c in f.translation_at(level)):
                violations.append(Violation(level, None, "translation part is not integral"))
    unique = tuple(dict.fromkeys(violations))
    if unique:
        logger.debug(f"⚠️ canonical-form violations: {[str(v) for v in unique]}")
    return ValidationReport(unique)


def _require_same(f, g):
    if f.filtration != g.filtration:
        raise FiltrationMismatch(
            f"filtrations {f.filtration.block_dims} and {g.filtration.block_dims} differ"
        )


def compose_maps(f, g):
    """``f ∘ g``."""
    _require_same(f, g)
    return CanonicalMap(f.filtration, compose(list(f.components), list(g.components)))


def _invert(f):
    filtration = f.filtration
    h = filtration.dimension
    y = identity_vector(h)
    solved = [MultiPoly.zero(h)] * h
    for level in range(1, filtration.levels + 1):
        block = f.block(level)
        if det(block) == 0:
            raise NotInvertible(level)
        block_inverse = block.inverse()
        span = filtration.span(level)
        tail = f.tail(level)
        rhs = [y[r] - q.substitute(solved) for r, q in zip(span, tail)]
        for r_local, r in enumerate(span):
            component = MultiPoly.zero(h)
            for c_local in range(len(span)):
                coefficient = block_inverse[r_local, c_local]
                if coefficient:
                    component = component + rhs[c_local] * coefficient
            solved[r] = component
    return CanonicalMap(filtration, solved)


def invert_map(f):
    """Exact inverse by level-by-level back substitution."""
    return f.inverse


def power_map(f, exponent):
    if exponent == 0:
        return CanonicalMap.identity(f.filtration)
    base = f if exponent > 0 else invert_map(f)
    e = abs(exponent)
    result = None
    while e:
        if e & 1:
            result = base if result is None else compose_maps(result, base)
        e >>= 1
        if e:
            base = compose_maps(base, base)
    return result


def conjugate_map(g, f):
    """``g ∘ f ∘ g^-1``."""
    return compose_maps(compose_maps(g, f), invert_map(g))


def linearisation(f):
    """Diagonal blocks D_1..D_n (integer matrices where integral)."""
    return [f.block(level) for level in range(1, f.filtration.levels + 1)]


def jacobian_at(f, point):
    if len(point) != f.filtration.dimension:
        raise DimensionError(f"point of length {len(point)} for dimension {f.filtration.dimension}")
    return jacobian_matrix_at(list(f.components), tuple(Fraction(v) for v in point))
