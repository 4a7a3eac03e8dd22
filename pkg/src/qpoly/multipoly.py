"""Sparse multivariate polynomials with exact rational coefficients.

A polynomial is a map from exponent vectors to nonzero ``Fraction``
coefficients, e.g. ``3 + 2*x0*x1 - x2^2`` on three variables is
``{(0,0,0): 3, (1,1,0): 2, (0,0,2): -1}``. Zero coefficients are never
stored, so equal polynomials have identical term maps.
"""
from fractions import Fraction

import numpy as np

from common.errors import ArityError
from exactla.matrices import RationalMatrix, as_fraction


def grlex_key(exponent):
    """Sort key for graded lexicographic order (total degree first)."""
    return (sum(exponent), exponent)


class MultiPoly:
    __slots__ = ("num_vars", "_terms")

    def __init__(self, num_vars, terms=None):
        self.num_vars = num_vars
        clean = {}
        for exponent, coefficient in (terms or {}).items():
            exponent = tuple(int(e) for e in exponent)
            if len(exponent) != num_vars:
                raise ArityError(
                    f"exponent {exponent} has {len(exponent)} entries, expected {num_vars}"
                )
            if any(e < 0 for e in exponent):
                raise ValueError(f"negative exponent in {exponent}")
            coefficient = clean.get(exponent, 0) + as_fraction(coefficient)
            if coefficient:
                clean[exponent] = coefficient
            else:
                clean.pop(exponent, None)
        self._terms = clean

    @classmethod
    def zero(cls, num_vars):
        return cls(num_vars)

    @classmethod
    def constant(cls, num_vars, value):
        return cls(num_vars, {(0,) * num_vars: value})

    @classmethod
    def variable(cls, num_vars, index):
        if not 0 <= index < num_vars:
            raise ArityError(f"variable x{index} outside {num_vars} variables")
        exponent = [0] * num_vars
        exponent[index] = 1
        return cls(num_vars, {tuple(exponent): 1})

    @classmethod
    def linear(cls, coefficients, constant=0):
        """``c_0 x_0 + ... + c_{n-1} x_{n-1} + constant``."""
        n = len(coefficients)
        terms = {(0,) * n: constant}
        for i, c in enumerate(coefficients):
            exponent = [0] * n
            exponent[i] = 1
            terms[tuple(exponent)] = c
        return cls(n, terms)

    # inspection ---------------------------------------------------------

    def terms(self):
        """``(exponent, coefficient)`` pairs in descending grlex order."""
        return sorted(self._terms.items(), key=lambda item: grlex_key(item[0]), reverse=True)

    def coefficient(self, exponent):
        return self._terms.get(tuple(exponent), Fraction(0))

    @property
    def constant_term(self):
        return self.coefficient((0,) * self.num_vars)

    def is_zero(self):
        return not self._terms

    def is_constant(self):
        return all(not any(e) for e in self._terms)

    def degree(self):
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self._terms), default=-1)

    def degree_in(self, index):
        return max((e[index] for e in self._terms), default=-1)

    def variables_used(self):
        return sorted({i for e in self._terms for i, k in enumerate(e) if k})

    def linear_part(self):
        """Coefficients of the degree-one monomials, as a tuple of length num_vars."""
        out = [Fraction(0)] * self.num_vars
        for exponent, c in self._terms.items():
            if sum(exponent) == 1:
                out[exponent.index(1)] = c
        return tuple(out)

    def is_affine(self):
        return self.degree() <= 1

    def has_integer_coefficients(self):
        return all(c.denominator == 1 for c in self._terms.values())

    # arithmetic -----------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, MultiPoly):
            if other.num_vars != self.num_vars:
                raise ArityError(
                    f"cannot combine polynomials in {self.num_vars} and {other.num_vars} variables"
                )
            return other
        return MultiPoly.constant(self.num_vars, other)

    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self._terms)
        for exponent, c in other._terms.items():
            terms[exponent] = terms.get(exponent, 0) + c
        return MultiPoly(self.num_vars, terms)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.num_vars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            return self.scale(other)
        other = self._coerce(other)
        terms = {}
        for e0, c0 in self._terms.items():
            for e1, c1 in other._terms.items():
                exponent = tuple(a + b for a, b in zip(e0, e1))
                terms[exponent] = terms.get(exponent, 0) + c0 * c1
        return MultiPoly(self.num_vars, terms)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, factor):
        factor = as_fraction(factor)
        return MultiPoly(self.num_vars, {e: c * factor for e, c in self._terms.items()})

    def __pow__(self, exponent):
        if exponent < 0:
            raise ValueError("polynomials have no negative powers")
        result = MultiPoly.constant(self.num_vars, 1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.num_vars == other.num_vars and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_term == other
        return NotImplemented

    def __hash__(self):
        return hash((self.num_vars, frozenset(self._terms.items())))

    # calculus and evaluation --------------------------------------------

    def derivative(self, index):
        terms = {}
        for exponent, c in self._terms.items():
            k = exponent[index]
            if k:
                lowered = list(exponent)
                lowered[index] -= 1
                terms[tuple(lowered)] = c * k
        return MultiPoly(self.num_vars, terms)

    def evaluate(self, point):
        """Exact value at a point of rationals (or MultiPolys, for substitution)."""
        if len(point) != self.num_vars:
            raise ArityError(f"point of length {len(point)} for {self.num_vars} variables")
        total = Fraction(0)
        for exponent, c in self._terms.items():
            value = c
            for x, k in zip(point, exponent):
                if k:
                    value = value * x ** k
            total = value + total
        return total

    def evaluate_numeric(self, point):
        """Floating-point value, for numerical cross-checks only."""
        point = np.asarray(point, dtype=float)
        if point.shape[-1] != self.num_vars:
            raise ArityError(f"point of length {point.shape[-1]} for {self.num_vars} variables")
        total = np.zeros(point.shape[:-1])
        for exponent, c in self._terms.items():
            total = total + float(c) * np.prod(point ** np.array(exponent), axis=-1)
        return total

    def substitute(self, inner):
        """``self(inner_0, ..., inner_{n-1})`` for polynomials ``inner``."""
        if len(inner) != self.num_vars:
            raise ArityError(f"{len(inner)} substitutions for {self.num_vars} variables")
        if not inner:
            return MultiPoly(0, dict(self._terms))
        target = inner[0].num_vars
        if any(p.num_vars != target for p in inner):
            raise ArityError("substituted polynomials disagree on their variable count")
        powers = {}
        total = MultiPoly.zero(target)
        for exponent, c in self._terms.items():
            term = MultiPoly.constant(target, c)
            for i, k in enumerate(exponent):
                if k:
                    if (i, k) not in powers:
                        powers[(i, k)] = inner[i] ** k
                    term = term * powers[(i, k)]
            total = total + term
        return total

    def extend(self, num_vars):
        """The same polynomial viewed in ``num_vars`` >= current variables."""
        if num_vars < self.num_vars:
            if any(any(e[num_vars:]) for e in self._terms):
                raise ArityError(f"polynomial uses variables beyond x{num_vars - 1}")
            return MultiPoly(num_vars, {e[:num_vars]: c for e, c in self._terms.items()})
        pad = (0,) * (num_vars - self.num_vars)
        return MultiPoly(num_vars, {e + pad: c for e, c in self._terms.items()})

    def to_terms(self):
        """Serializable list of ``(coefficient string, exponent list)`` in grlex order."""
        return [(_fraction_str(c), list(e)) for e, c in self.terms()]

    def __repr__(self):
        return f"MultiPoly({self.num_vars}, {dict(self.terms())!r})"

    def __str__(self):
        return self.format()

    def format(self, names=None):
        names = names or [f"x{i + 1}" for i in range(self.num_vars)]
        if not self._terms:
            return "0"
        pieces = []
        for exponent, c in self.terms():
            monomial = "*".join(
                name if k == 1 else f"{name}^{k}"
                for name, k in zip(names, exponent) if k
            )
            if not monomial:
                pieces.append(_fraction_str(c))
            elif c == 1:
                pieces.append(monomial)
            elif c == -1:
                pieces.append(f"-{monomial}")
            else:
                pieces.append(f"{_fraction_str(c)}*{monomial}")
        return " + ".join(pieces).replace("+ -", "- ")


def _fraction_str(value):
    value = Fraction(value)
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def identity_vector(num_vars):
    return [MultiPoly.variable(num_vars, i) for i in range(num_vars)]


def compose(outer, inner):
    """Component-wise ``outer ∘ inner`` of polynomial vectors."""
    for p in outer:
        if p.num_vars != len(inner):
            raise ArityError(
                f"outer polynomial in {p.num_vars} variables composed with {len(inner)} components"
            )
    return [p.substitute(inner) for p in outer]


def jacobian(vector):
    """Matrix of partial derivatives, entry (i, j) = d f_i / d x_j."""
    return [[p.derivative(j) for j in range(p.num_vars)] for p in vector]


def evaluate_vector(vector, point):
    return tuple(p.evaluate(point) for p in vector)


def jacobian_matrix_at(vector, point):
    """Exact Jacobian of a polynomial vector at a rational point."""
    rows = [[entry.evaluate(point) for entry in row] for row in jacobian(vector)]
    if not rows:
        return RationalMatrix(0, len(point), ())
    return RationalMatrix.from_rows(rows)


def finite_difference_jacobian(vector, point, step=1e-6):
    """Central finite-difference Jacobian in floating point (an oracle for tests)."""
    point = np.asarray([float(x) for x in point])
    n = point.shape[0]
    out = np.zeros((len(vector), n))
    for j in range(n):
        delta = np.zeros(n)
        delta[j] = step * max(1.0, abs(point[j]))
        up = np.array([p.evaluate_numeric(point + delta) for p in vector])
        down = np.array([p.evaluate_numeric(point - delta) for p in vector])
        out[:, j] = (up - down) / (2 * delta[j])
    return out
