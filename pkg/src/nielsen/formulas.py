"""Nielsen numbers from linearisations: product formula and the averaging formulas.

Every route averages ``Π_i |det(I - A_i(α) F_i)|`` over the cosets of a
finite-index subgroup. The invariant route reads the blocks off
``ρ(α) ∘ p``; the net route reads them from the M^i matrices of the
m-th power images; the Jacobian route evaluates ``det(I - J)`` at sample
points and demands that it does not move.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from common.errors import HypothesisViolation, InconsistentResult, StructuralError
from exactla.matrices import RationalMatrix, det_i_minus
from canonical.group import HypothesisStatus, SubgroupSpec
from canonical.maps import compose_maps, jacobian_at, linearisation
from spectra.certify import net_certify, nr_certify

logger = logging.getLogger(__name__)

DEFAULT_SUBGROUP = "K"
DEFAULT_NET_SUBGROUP = "Kprime"


@dataclass
class CosetTerm:
    rep: str
    determinants: tuple

    @property
    def product(self):
        out = Fraction(1)
        for d in self.determinants:
            out *= d
        return out

    @property
    def value(self):
        return abs(self.product)


@dataclass
class NielsenResult:
    value: int
    index: int
    terms: list
    route: str
    hypotheses: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def conditional(self):
        return any(h.downgraded for h in self.hypotheses)

    def total(self):
        return sum(t.value for t in self.terms)


def nielsen_product(blocks):
    """``Π_i |det(I - F_i)|`` for the linearisation of a map on an NR solvmanifold."""
    value = Fraction(1)
    for F in blocks:
        value *= abs(det_i_minus(F))
    if value.denominator != 1:
        raise InconsistentResult(f"product formula gave the non-integer {value}")
    return int(value)


def resolve_subgroup(group, name):
    """The named subgroup; the whole group stands in when no ``K`` is declared."""
    if name in group.subgroups:
        return group.subgroups[name]
    if name == DEFAULT_SUBGROUP:
        logger.debug("no subgroup K declared, averaging over the whole group")
        return SubgroupSpec(
            name="Π",
            coset_reps=("",),
            generators=tuple(sorted(group.generators)),
            fully_invariant=True,
        )
    return group.subgroup(name)


def _status_from(subject, certification, assumption, asserted_as):
    if certification.refuted:
        raise HypothesisViolation(f"{subject}: {certification}")
    if certification.certified:
        return HypothesisStatus(subject, "certified", str(certification), certification)
    if assumption == asserted_as:
        status = HypothesisStatus(subject, "asserted", str(certification), certification)
    else:
        status = HypothesisStatus(subject, "conditional", str(certification), certification)
    logger.warning(f"⚠️ {subject} is {status.status}: {certification}")
    return status


def nr_status(group, sub, word_bound=3):
    """Certify (or fall back to the assertion for) the NR property of ``sub``."""
    certification = nr_certify(group.level_actions(sub.generators), word_bound)
    return _status_from(f"{sub.name} is NR", certification, sub.assumption, "NR")


@lru_cache(maxsize=256)
def _net_verdict(block, exponent_bound):
    return net_certify(block, exponent_bound)


def net_status(group, sub, exponent_bound=2):
    """Net certification of every level block of ``sub``'s generators."""
    verdicts = []
    for level, blocks in group.level_actions(sub.generators).items():
        for word, block in blocks.items():
            if block.is_identity():
                continue
            certification = _net_verdict(block, exponent_bound)
            if certification.refuted:
                raise HypothesisViolation(f"{sub.name} is not net: {word} at level {level} {certification}")
            verdicts.append(certification)
    weakest = next((c for c in verdicts if not c.certified), None)
    if weakest is None:
        return HypothesisStatus(f"{sub.name} is net", "certified", "Certified")
    return _status_from(f"{sub.name} is net", weakest, sub.assumption, "net")


def coset_term(group, endo, rep):
    blocks = linearisation(compose_maps(group.element(rep), endo.lift))
    return CosetTerm(rep, tuple(det_i_minus(b) for b in blocks))


def _average(terms, index, route):
    total = sum(t.value for t in terms)
    if total % index:
        raise InconsistentResult(f"{route} route: sum {total} is not divisible by the index {index}")
    return int(total / index)


def nielsen_average_invariant(group, endo, subgroup=DEFAULT_SUBGROUP, word_bound=3):
    """N(f) as the average of the determinant products over Π/K for a fully invariant NR K."""
    sub = resolve_subgroup(group, subgroup)
    if not sub.fully_invariant:
        raise HypothesisViolation(f"subgroup {sub.name} is not marked fully invariant")
    status = nr_status(group, sub, word_bound)
    terms = [coset_term(group, endo, rep) for rep in sub.coset_reps]
    for term in terms:
        logger.debug(f"coset {term.rep or '1'}: determinants {[str(d) for d in term.determinants]}")
    value = _average(terms, sub.index, "invariant")
    logger.info(f"✅ N(f) = {value} (average over {sub.index} cosets of {sub.name})")
    return NielsenResult(value, sub.index, terms, "invariant", [status])


def mi_matrix(group, endo, level, rep, m):
    """``(1/m) [ψ_α(z_j^m)]`` in the level generators' basis, ψ_α = τ_α ∘ φ."""
    view = group.view()
    twisted = endo.twisted_by(group.element(rep)) if rep else endo
    columns = []
    for word in view.level_words[level - 1]:
        image = twisted.image(group, " ".join([word] * m))
        coords = view.coordinates(level, image)
        if coords is None:
            translated = image.is_level_translation(level)
            raise StructuralError(
                f"ψ_{rep or '1'}({word}^{m}) is not a level-{level} "
                + ("lattice point" if translated else "translation")
            )
        columns.append([Fraction(c, m) for c in coords])
    k = len(columns)
    return RationalMatrix.from_rows([[columns[j][i] for j in range(k)] for i in range(k)])


def power_subgroup_report(group, endo, m, reps=None):
    """Every M^i for every coset representative, for the m-th power subgroup."""
    reps = reps if reps is not None else resolve_subgroup(group, DEFAULT_NET_SUBGROUP).coset_reps
    rows = []
    for rep in reps:
        for level in range(1, group.filtration.levels + 1):
            M = mi_matrix(group, endo, level, rep, m)
            rows.append({"rep": rep or "1", "level": level, "M": M, "det": det_i_minus(M)})
    return rows


def nielsen_average_net(group, endo, net_subgroup=DEFAULT_NET_SUBGROUP, inner=DEFAULT_SUBGROUP,
                        exponent_bound=2, m=None):
    """N(f) averaged over Π/K' for a net K' containing a fully invariant K.

    The per-coset terms come from the M^i matrices of the m-th power
    images (m = [Π:K'] unless given) and are checked against the
    linearisation blocks of ``ρ(α) ∘ p``.
    """
    kprime = resolve_subgroup(group, net_subgroup)
    k_inner = resolve_subgroup(group, inner)
    if not k_inner.fully_invariant:
        raise HypothesisViolation(f"inner subgroup {k_inner.name} is not marked fully invariant")
    status = net_status(group, kprime, exponent_bound)
    m = m or kprime.index
    terms = []
    for rep in kprime.coset_reps:
        dets = []
        for level in range(1, group.filtration.levels + 1):
            dets.append(det_i_minus(mi_matrix(group, endo, level, rep, m)))
        term = CosetTerm(rep, tuple(dets))
        check = coset_term(group, endo, rep)
        if term.value != check.value:
            raise InconsistentResult(
                f"coset {rep or '1'}: |det(I - M)| = {term.value} but |det(I - A F)| = {check.value}"
            )
        terms.append(term)
    value = _average(terms, kprime.index, "net")
    logger.info(f"✅ N(f) = {value} (average over {kprime.index} cosets of {kprime.name})")
    return NielsenResult(value, kprime.index, terms, "net", [status])


def random_points(dimension, samples, seed):
    """Rational sample points with numerators in [-9, 9] and denominators in [1, 7]."""
    rng = np.random.default_rng(seed)
    numerators = rng.integers(-9, 10, size=(samples, dimension))
    denominators = rng.integers(1, 8, size=(samples, dimension))
    return [
        tuple(Fraction(int(p), int(q)) for p, q in zip(row_p, row_q))
        for row_p, row_q in zip(numerators, denominators)
    ]


def nielsen_via_jacobian(group, endo, sample_points=None, samples=10, seed=20240601,
                         subgroup=DEFAULT_SUBGROUP, word_bound=3):
    """N(f) from ``|det(I - J(ρ(α) ∘ p)_x)|``, which must not depend on x."""
    sub = resolve_subgroup(group, subgroup)
    if not sub.fully_invariant:
        raise HypothesisViolation(f"subgroup {sub.name} is not marked fully invariant")
    points = sample_points or random_points(group.filtration.dimension, samples, seed)
    terms = []
    for rep in sub.coset_reps:
        f = compose_maps(group.element(rep), endo.lift)
        values = {det_i_minus(jacobian_at(f, x)) for x in points}
        if len(values) != 1:
            raise HypothesisViolation(
                f"det(I - J) at coset {rep or '1'} depends on the point: {sorted(str(v) for v in values)}"
            )
        terms.append(CosetTerm(rep, (values.pop(),)))
    value = _average(terms, sub.index, "jacobian")
    reference = nielsen_average_invariant(group, endo, subgroup, word_bound)
    if value != reference.value:
        raise InconsistentResult(f"Jacobian route gave {value}, linearisation route {reference.value}")
    logger.info(f"✅ N(f) = {value} from det(I - J) constant over {len(points)} points")
    return NielsenResult(value, sub.index, terms, "jacobian", reference.hypotheses)
