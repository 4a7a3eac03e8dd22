"""Univariate integer polynomials, cyclotomic detection and Sturm counts."""
from dataclasses import dataclass
from math import lcm
from functools import lru_cache, reduce

import sympy

from common.errors import NielsenError

_X = sympy.Symbol("x")


@dataclass(frozen=True)
class IntPolynomial:
    """Integer polynomial, coefficients in ascending degree order.

    The stored tuple never has trailing zeros, so the zero polynomial is
    ``()`` and equality is coefficient equality.
    """

    coefficients: tuple

    def __post_init__(self):
        coeffs = [int(c) for c in self.coefficients]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "coefficients", tuple(coeffs))

    @classmethod
    def from_sympy(cls, expr, symbol=_X):
        poly = sympy.Poly(expr, symbol)
        if poly.is_zero:
            return cls(())
        coeffs = poly.all_coeffs()[::-1]
        if any(not sympy.sympify(c).is_integer for c in coeffs):
            raise ValueError(f"{expr} has non-integer coefficients")
        return cls(tuple(int(c) for c in coeffs))

    @classmethod
    def from_roots(cls, roots):
        poly = (1,)
        for r in roots:
            poly = _multiply(poly, (-r, 1))
        return cls(poly)

    def to_sympy(self, symbol=_X):
        return sympy.Poly(list(reversed(self.coefficients)) or [0], symbol, domain="ZZ")

    @property
    def degree(self):
        return len(self.coefficients) - 1

    def is_zero(self):
        return not self.coefficients

    def is_monic(self):
        return bool(self.coefficients) and self.coefficients[-1] == 1

    def leading(self):
        return self.coefficients[-1] if self.coefficients else 0

    def __call__(self, value):
        result = 0
        for c in reversed(self.coefficients):
            result = result * value + c
        return result

    def __mul__(self, other):
        return IntPolynomial(_multiply(self.coefficients, other.coefficients))

    def divides(self, other):
        """True when ``self`` divides ``other`` in Q[x]."""
        if self.is_zero():
            return other.is_zero()
        return other.to_sympy().rem(self.to_sympy()).is_zero

    def __str__(self):
        if not self.coefficients:
            return "0"
        return str(self.to_sympy().as_expr()).replace("**", "^")


def _multiply(a, b):
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return tuple(out)


def euler_phi(d):
    return int(sympy.totient(d))


def cyclotomic_polynomial(d):
    return IntPolynomial.from_sympy(sympy.cyclotomic_poly(d, _X))


@lru_cache(maxsize=None)
def orders_with_phi_at_most(bound):
    """All ``d`` with Euler-phi(d) <= bound (phi(d) >= sqrt(d/2) caps the search)."""
    if bound < 1:
        return ()
    return tuple(d for d in range(1, 2 * bound * bound + 3) if euler_phi(d) <= bound)


def cyclotomic_factor_scan(poly, include_trivial=False):
    """Orders ``d`` such that the d-th cyclotomic polynomial divides ``poly``.

    Every cyclotomic factor has degree phi(d), so scanning phi(d) <= deg(poly)
    is exhaustive. ``d = 1`` (the eigenvalue 1) is reported only on request.
    """
    if poly.is_zero():
        raise NielsenError("cyclotomic_factor_scan of the zero polynomial")
    target = poly.to_sympy()
    found = []
    for d in orders_with_phi_at_most(poly.degree):
        if d == 1 and not include_trivial:
            continue
        if target.rem(sympy.Poly(sympy.cyclotomic_poly(d, _X), _X)).is_zero:
            found.append(d)
    return found


def sturm_sign_changes(poly, point):
    """Sign changes of the Sturm sequence of ``poly`` at ``point`` (a rational or ±oo)."""
    sequence = sympy.sturm(poly.to_sympy())
    signs = []
    for p in sequence:
        if point is sympy.oo or point is -sympy.oo:
            lead = p.LC()
            value = lead if (point is sympy.oo or p.degree() % 2 == 0) else -lead
        else:
            value = p.eval(point)
        if value != 0:
            signs.append(value > 0)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_real_roots(poly, lower=-sympy.oo, upper=sympy.oo):
    """Distinct real roots in the half-open interval (lower, upper]."""
    return sturm_sign_changes(poly, lower) - sturm_sign_changes(poly, upper)


def all_roots_real_positive(poly):
    """Exact test that every complex root of ``poly`` is a positive real.

    Works on the squarefree part so Sturm counts (distinct roots) can be
    compared with the degree.
    """
    if poly.is_zero():
        return False
    sf = _primitive(poly.to_sympy().sqf_part())
    if sf.degree == 0:
        return True
    if sf(0) == 0:
        return False
    positive = count_real_roots(sf, 0, sympy.oo)
    return positive == sf.degree


def _primitive(poly):
    coeffs = poly.all_coeffs()[::-1]
    denominators = [sympy.Rational(c).q for c in coeffs]
    scale = reduce(lcm, denominators, 1)
    return IntPolynomial(tuple(int(sympy.Rational(c) * scale) for c in coeffs))
