"""Cross-checks between the Nielsen and Reidemeister computations."""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from common.counts import INFINITE, count_to_json, is_finite, nielsen_of_count
from common.errors import HypothesisViolation, InconsistentResult
from exactla.matrices import IntegerMatrix, det_i_minus
from reidemeister.classes import reidemeister_filtered
from spectra.certify import net_certify
from nielsen.formulas import DEFAULT_SUBGROUP, coset_term, nielsen_average_invariant, resolve_subgroup

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class InvarianceViolation:
    vector: tuple
    reason: str

    def __str__(self):
        return f"v = {self.vector}: {self.reason}"


@dataclass
class InvarianceReport:
    reference: object
    checked: int = 0
    violations: list = field(default_factory=list)
    net: str = "certified"

    @property
    def ok(self):
        return not self.violations


def lattice_action(generators, vector):
    """``A(v) = A_1^v_1 ... A_m^v_m`` for commuting generators."""
    n = generators[0].rows
    result = IntegerMatrix.identity(n)
    for g, e in zip(generators, vector):
        if e:
            result = result @ g.power(int(e))
    return result.to_integer() if result.is_integral() else result


def appendix_invariance_check(X, A_gen, Phi, k=1, bound=3, assume_net=False, exponent_bound=2):
    """``det(I - A(v) X) = det(I - X)`` for every ``|v_j| <= bound``.

    Preconditions: Φ has no eigenvalue 1, ``X A(kv) = A(Φ(kv)) X`` on the
    tested range, and every A(v) is net (certified, or asserted through
    ``assume_net``). Precondition failures are reported with their v.
    """
    if det_i_minus(Phi) == 0:
        raise HypothesisViolation("Φ has 1 as an eigenvalue")
    reference = det_i_minus(X)
    report = InvarianceReport(reference=reference, net="asserted" if assume_net else "certified")
    rank = len(A_gen)
    for v in product(range(-bound, bound + 1), repeat=rank):
        report.checked += 1
        kv = tuple(k * x for x in v)
        image = Phi.apply(kv)
        if any(Fraction(c).denominator != 1 for c in image):
            report.violations.append(InvarianceViolation(v, f"Φ(kv) = {image} is not integral"))
            continue
        image = tuple(int(c) for c in image)
        if X @ lattice_action(A_gen, kv) != lattice_action(A_gen, image) @ X:
            report.violations.append(InvarianceViolation(v, "X A(kv) != A(Φ(kv)) X"))
            continue
        Av = lattice_action(A_gen, v)
        if not assume_net and not Av.is_identity():
            certification = net_certify(Av, exponent_bound)
            if not certification.certified:
                report.violations.append(InvarianceViolation(v, f"A(v) net status {certification}"))
                continue
        value = det_i_minus(Av @ X)
        if value != reference:
            report.violations.append(
                InvarianceViolation(v, f"det(I - A(v) X) = {value}, expected {reference}")
            )
    if report.ok:
        logger.info(f"✅ det(I - A(v) X) = {reference} on all {report.checked} vectors")
    else:
        logger.error(f"❌ {len(report.violations)} of {report.checked} vectors violate the invariance")
    return report


@dataclass
class CoverTerm:
    rep: str
    reidemeister: object
    nielsen: int


@dataclass
class NEqualsR:
    nielsen: object
    reidemeister: object
    cover_terms: list
    notes: list = field(default_factory=list)

    @property
    def consistent(self):
        if not is_finite(self.reidemeister):
            return True
        return self.nielsen.value == self.reidemeister

    def to_json(self):
        return {
            "nielsen": self.nielsen.value,
            "reidemeister": count_to_json(self.reidemeister),
            "cover_terms": [
                {"rep": t.rep or "1", "reidemeister": count_to_json(t.reidemeister), "nielsen": t.nielsen}
                for t in self.cover_terms
            ],
            "notes": list(self.notes),
        }


def n_equals_r_check(group, endo, subgroup=DEFAULT_SUBGROUP, notes=(), word_bound=3):
    """N(f) and R(f) side by side; equal whenever R(f) is finite.

    The cover terms give, per coset of K, the Reidemeister number of the
    lift to the NR cover (``Π_i |det(I - A_i F_i)|``, zero determinant
    meaning infinity) and the Nielsen number it forces.
    """
    nielsen = nielsen_average_invariant(group, endo, subgroup, word_bound)
    reidemeister = reidemeister_filtered(group, endo).count
    cover_terms = []
    for rep in resolve_subgroup(group, subgroup).coset_reps:
        term = coset_term(group, endo, rep)
        count = INFINITE if term.product == 0 else int(term.value)
        cover_terms.append(CoverTerm(rep, count, nielsen_of_count(count)))
    result = NEqualsR(nielsen, reidemeister, cover_terms, list(notes))
    if not result.consistent:
        raise InconsistentResult(f"R(f) = {reidemeister} is finite but N(f) = {nielsen.value}")
    if is_finite(reidemeister):
        logger.info(f"✅ N(f) = R(f) = {reidemeister}")
    else:
        logger.info(f"✅ R(f) = infinity, N(f) = {nielsen.value}")
    return result
