"""Certificates for the NR and net properties of integer matrix actions.

Rank-one actions and the sufficient conditions below are decided exactly;
everything else is a bounded search whose honest outcome may be
``InconclusiveUpToBound``.
"""
import logging
from dataclasses import dataclass, field
from functools import reduce
from itertools import combinations_with_replacement, product
from math import lcm

import numpy as np

from common.errors import DimensionError, HypothesisViolation, NonCommutingGenerators
from exactla.matrices import IntegerMatrix, char_poly, det
from exactla.polynomials import (
    all_roots_real_positive,
    cyclotomic_factor_scan,
    orders_with_phi_at_most,
)

logger = logging.getLogger(__name__)

CERTIFIED = "Certified"
REFUTED = "Refuted"
INCONCLUSIVE = "InconclusiveUpToBound"


@dataclass(frozen=True)
class Witness:
    word: str
    level: object
    order: int


@dataclass(frozen=True)
class Certification:
    verdict: str
    witness: Witness = None
    bound: int = None
    method: str = ""

    @property
    def certified(self):
        return self.verdict == CERTIFIED

    @property
    def refuted(self):
        return self.verdict == REFUTED

    def __str__(self):
        if self.verdict == REFUTED:
            w = self.witness
            where = f" at level {w.level}" if w.level is not None else ""
            return f"Refuted(word {w.word}{where}, cyclotomic order {w.order})"
        if self.verdict == INCONCLUSIVE:
            return f"InconclusiveUpToBound({self.bound})"
        return "Certified"

    def to_json(self):
        out = {"verdict": self.verdict, "method": self.method}
        if self.witness is not None:
            out["witness"] = {
                "word": self.witness.word,
                "level": self.witness.level,
                "order": self.witness.order,
            }
        if self.bound is not None:
            out["bound"] = self.bound
        return out


@dataclass(frozen=True)
class SpectralEntry:
    level: object
    word: str
    char_poly: object
    cyclotomic_orders: tuple
    unit_modulus_roots: int

    @property
    def has_unit_modulus_root(self):
        return self.unit_modulus_roots > 0


@dataclass
class SpectralReport:
    entries: list = field(default_factory=list)
    verdict: Certification = None

    def rows(self):
        return [
            {
                "level": e.level,
                "word": e.word,
                "char_poly": str(e.char_poly),
                "cyclotomic_orders": ",".join(str(d) for d in e.cyclotomic_orders) or "-",
                "unit_modulus_roots": e.unit_modulus_roots,
            }
            for e in self.entries
        ]


def _integer_square(matrix):
    if not matrix.is_square:
        raise DimensionError(f"expected a square matrix, got {matrix.rows}x{matrix.cols}")
    return matrix if isinstance(matrix, IntegerMatrix) else matrix.to_integer()


def _normalise_actions(actions):
    """``{level: [(name, matrix), ...]}`` from a mapping or a per-level sequence."""
    if isinstance(actions, dict):
        items = actions.items()
    else:
        items = enumerate(actions, start=1)
    out = {}
    for level, gens in items:
        if isinstance(gens, dict):
            pairs = list(gens.items())
        else:
            pairs = [(f"g{j + 1}", m) for j, m in enumerate(gens)]
        out[level] = [(name, _integer_square(m)) for name, m in pairs]
    return out


def _unit_modulus_roots(poly):
    if poly.degree < 1:
        return 0
    roots = np.roots([float(c) for c in reversed(poly.coefficients)])
    return int(np.sum(np.abs(np.abs(roots) - 1.0) < 1e-9))


def _entry(level, word, matrix):
    poly = char_poly(matrix)
    return SpectralEntry(
        level=level,
        word=word,
        char_poly=poly,
        cyclotomic_orders=tuple(cyclotomic_factor_scan(poly)),
        unit_modulus_roots=_unit_modulus_roots(poly),
    )


def word_matrix(generators, exponents):
    """Product of commuting generator powers ``G_1^e_1 ... G_r^e_r``."""
    n = generators[0][1].rows
    result = IntegerMatrix.identity(n)
    for (_, g), e in zip(generators, exponents):
        if e:
            result = result @ g.power(e)
    return result.to_integer() if result.is_integral() else result


def word_name(generators, exponents):
    parts = [name if e == 1 else f"{name}^{e}" for (name, _), e in zip(generators, exponents) if e]
    return " ".join(parts) or "1"


def _exponent_vectors(rank, bound):
    vectors = [
        e for e in product(range(-bound, bound + 1), repeat=rank)
        if 1 <= sum(abs(x) for x in e) <= bound
    ]
    return sorted(vectors, key=lambda e: (sum(abs(x) for x in e), e))


def check_commuting(level, generators):
    for (n1, g1), (n2, g2) in combinations_with_replacement(generators, 2):
        if n1 != n2 and g1 @ g2 != g2 @ g1:
            raise NonCommutingGenerators(level, n1, n2)


def nr_certify(actions, word_bound=3, report=None):
    """NR certificate for per-level commuting generator actions.

    A level generated by one non-identity matrix is decided exactly; larger
    ranks scan every word with exponent sum at most ``word_bound``.
    """
    actions = _normalise_actions(actions)
    inconclusive = False
    for level in sorted(actions):
        gens = [(name, g) for name, g in actions[level] if not g.is_identity()]
        unique = []
        for name, g in gens:
            if all(g != other for _, other in unique):
                unique.append((name, g))
        check_commuting(level, unique)
        if not unique:
            continue
        if len(unique) == 1:
            name, g = unique[0]
            entry = _entry(level, name, g)
            if report is not None:
                report.entries.append(entry)
            if entry.cyclotomic_orders:
                logger.info(f"🔎 level {level}: {name} has a root of unity of order {entry.cyclotomic_orders[0]}")
                return Certification(REFUTED, Witness(name, level, entry.cyclotomic_orders[0]),
                                     method="rank-one")
            continue
        logger.debug(f"🔎 level {level}: scanning words of rank {len(unique)} up to {word_bound}")
        for exponents in _exponent_vectors(len(unique), word_bound):
            matrix = word_matrix(unique, exponents)
            if matrix.is_identity():
                continue
            entry = _entry(level, word_name(unique, exponents), matrix)
            if report is not None:
                report.entries.append(entry)
            if entry.cyclotomic_orders:
                return Certification(
                    REFUTED, Witness(entry.word, level, entry.cyclotomic_orders[0]),
                    bound=word_bound, method="word scan",
                )
        inconclusive = True
    if inconclusive:
        return Certification(INCONCLUSIVE, bound=word_bound, method="word scan")
    return Certification(CERTIFIED, method="rank-one")


def kronecker_word(matrix, exponents):
    """``M^e_1 ⊗ M^e_2 ⊗ ...`` (negative powers through the exact inverse)."""
    matrices = matrix if isinstance(matrix, (list, tuple)) else [matrix] * len(exponents)
    result = None
    for m, e in zip(matrices, exponents):
        factor = m.power(e)
        result = factor if result is None else result.kron(factor)
    return result.to_integer() if result.is_integral() else result


def _kronecker_tuples(bound):
    values = [e for e in range(-bound, bound + 1) if e]
    tuples = []
    for length in range(1, bound + 1):
        for t in combinations_with_replacement(values, length):
            if sum(abs(e) for e in t) <= bound:
                tuples.append(t)
    return tuples


def net_certify(matrix, exponent_bound=2, report=None):
    """Net certificate for a single unimodular integer matrix."""
    matrix = _integer_square(matrix)
    if abs(det(matrix)) != 1:
        raise HypothesisViolation(f"net_certify expects a unimodular matrix, det = {det(matrix)}")
    entry = _entry(None, "M", matrix)
    if report is not None:
        report.entries.append(entry)
    if entry.cyclotomic_orders:
        return Certification(REFUTED, Witness("M", None, entry.cyclotomic_orders[0]),
                             method="cyclotomic factor")
    if all_roots_real_positive(entry.char_poly):
        return Certification(CERTIFIED, method="real positive spectrum")
    for exponents in _kronecker_tuples(exponent_bound):
        product_matrix = kronecker_word(matrix, exponents)
        if not product_matrix.is_integral():
            continue
        word = " ⊗ ".join(f"M^{e}" for e in exponents)
        entry = _entry(None, word, product_matrix)
        if report is not None:
            report.entries.append(entry)
        if entry.cyclotomic_orders:
            logger.info(f"🔎 {word} has a root of unity of order {entry.cyclotomic_orders[0]}")
            return Certification(REFUTED, Witness(word, None, entry.cyclotomic_orders[0]),
                                 bound=exponent_bound, method="kronecker scan")
    return Certification(INCONCLUSIVE, bound=exponent_bound, method="kronecker scan")


def recheck_witness(certification, matrix):
    """Re-verify a refutation: the witness order must divide the char poly of ``matrix``."""
    if not certification.refuted:
        return True
    return certification.witness.order in cyclotomic_factor_scan(char_poly(_integer_square(matrix)))


def wilking_exponent(degree_bound):
    """lcm of all d with Euler-phi(d) <= degree_bound."""
    if degree_bound < 1:
        raise ValueError("degree bound must be at least 1")
    return reduce(lcm, orders_with_phi_at_most(degree_bound), 1)


def spectral_report(actions, word_bound=3):
    """Char polys and cyclotomic orders of every scanned word, plus the NR verdict."""
    report = SpectralReport()
    report.verdict = nr_certify(actions, word_bound, report=report)
    return report
