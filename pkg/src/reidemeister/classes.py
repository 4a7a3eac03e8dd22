"""Reidemeister classes: twisted conjugacy ``α ~ γ α ψ(γ)^-1``.

On a free abelian level the classes are the cokernel of ``I - F``. For a
filtered group the count is built top level down: every class of the
top level splits into the classes of the twisted map ``τ_r ∘ ψ`` on the
next level. A finite top quotient is handled by computing candidate
classes per top coset and merging them with a union-find over the
coset representatives.
"""
import logging
from dataclasses import dataclass, field

from common.counts import INFINITE, add_counts, count_leq, is_finite
from common.errors import HypothesisViolation, InconsistentResult
from exactla.matrices import IntegerMatrix
from exactla.smith import cokernel_classes, lattice_solve
from canonical.maps import compose_maps, invert_map

logger = logging.getLogger(__name__)


@dataclass
class ReidemeisterResult:
    count: object
    representatives: list = field(default_factory=list)

    @property
    def is_finite(self):
        return is_finite(self.count)


class UnionFind:
    def __init__(self, size):
        self.parent = list(range(size))

    def find(self, i):
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i, j):
        a, b = self.find(i), self.find(j)
        if a == b:
            return
        # the smaller index stays root, so roots are the first members
        if b < a:
            a, b = b, a
        self.parent[b] = a

    def roots(self):
        return sorted({self.find(i) for i in range(len(self.parent))})


def reidemeister_abelian(F):
    """Classes of Z^n under ``x ~ x + (I - F) y``, with Smith-derived representatives."""
    F = F if isinstance(F, IntegerMatrix) else F.to_integer()
    classes = cokernel_classes(IntegerMatrix.identity(F.rows) - F)
    if not classes.is_finite:
        return ReidemeisterResult(INFINITE)
    return ReidemeisterResult(len(classes.representatives), list(classes.representatives))


class TwistedClasses:
    """Twisted-conjugacy classes of an endomorphism on a filtered group.

    ``view`` supplies the level generators (and the top coset
    representatives, when the filtered part has finite index); ``endo``
    is the endomorphism, possibly already twisted by a conjugator.
    """

    def __init__(self, view, endo):
        self.view = view
        self.endo = endo
        self.group = view.group
        self._coset_cache = {}
        self._candidates = None
        self._lookup = None
        self._merged = None

    # filtered part -----------------------------------------------------

    def _level_classes(self, endo, level):
        matrix = endo.level_matrix(self.view, level)
        return matrix, cokernel_classes(IntegerMatrix.identity(matrix.rows) - matrix)

    def paths(self, endo, level=1):
        """``[(path, representative)]`` on the filtered part from ``level`` down, or INFINITE."""
        if level > self.view.levels:
            return [((), self.group.identity)]
        _, classes = self._level_classes(endo, level)
        if not classes.is_finite:
            logger.debug(f"level {level}: det(I - F) = 0, infinitely many classes")
            return INFINITE
        out = []
        for index, vector in enumerate(classes.representatives):
            r = self.view.level_element(level, vector)
            below = self.paths(endo.twisted_by(r), level + 1)
            if below is INFINITE:
                return INFINITE
            for path, rep in below:
                out.append(((index,) + path, compose_maps(rep, r)))
        return out

    def path_of(self, endo, element, level=1):
        """Class path of an element of the filtered part (finite case only)."""
        if level > self.view.levels:
            if not element.is_identity():
                raise InconsistentResult(f"element {element.format()} did not reduce to the identity")
            return ()
        matrix, classes = self._level_classes(endo, level)
        t = self.view.coordinates(level, element)
        if t is None:
            raise HypothesisViolation(f"element is not a level-{level} translation")
        index = classes.index_of(t)
        v = classes.representatives[index]
        target = tuple(a - b for a, b in zip(v, t))
        u = lattice_solve(IntegerMatrix.identity(matrix.rows) - matrix, target, classes.smith)
        if u is None:
            raise InconsistentResult(f"residue {v} is not congruent to {t}")
        gamma = self.view.level_element(level, u)
        gamma_image = endo.image_of_level_element(self.view, level, u)
        moved = compose_maps(compose_maps(gamma, element), invert_map(gamma_image))
        r = self.view.level_element(level, v)
        lower = compose_maps(moved, invert_map(r))
        return (index,) + self.path_of(endo.twisted_by(r), lower, level + 1)

    # finite top quotient -----------------------------------------------

    def _coset_endo(self, i):
        if i not in self._coset_cache:
            self._coset_cache[i] = self.endo.twisted_by(self.view.top_maps[i])
        return self._coset_cache[i]

    def candidates(self):
        """``[(coset, path, element)]`` before merging, or INFINITE."""
        if self._candidates is None:
            found = []
            for i, x in enumerate(self.view.top_maps):
                paths = self.paths(self._coset_endo(i))
                if paths is INFINITE:
                    self._candidates = INFINITE
                    return INFINITE
                found.extend((i, path, compose_maps(rep, x)) for path, rep in paths)
            self._candidates = found
            self._lookup = {(c[0], c[1]): k for k, c in enumerate(found)}
        return self._candidates

    def _candidate_index(self, element):
        i = self.view.coset_index(element)
        inner = compose_maps(element, invert_map(self.view.top_maps[i]))
        path = self.path_of(self._coset_endo(i), inner)
        return self._lookup[(i, path)]

    def merged(self):
        """Union-find roots over the candidates; each root is one class of the whole group."""
        if self._merged is None:
            candidates = self.candidates()
            if candidates is INFINITE:
                self._merged = INFINITE
                return INFINITE
            uf = UnionFind(len(candidates))
            if len(self.view.top_maps) > 1:
                for k, (_, _, element) in enumerate(candidates):
                    for word, x in zip(self.view.top_words, self.view.top_maps):
                        moved = compose_maps(
                            compose_maps(x, element),
                            invert_map(self.endo.image(self.group, word)),
                        )
                        uf.union(k, self._candidate_index(moved))
            self._merged = (uf, uf.roots())
            logger.debug(f"{len(candidates)} candidate classes merged into {len(self._merged[1])}")
        return self._merged

    def result(self):
        merged = self.merged()
        if merged is INFINITE:
            return ReidemeisterResult(INFINITE)
        _, roots = merged
        return ReidemeisterResult(len(roots), [self._candidates[k][2] for k in roots])

    def class_index(self, element):
        """Position (in ``result().representatives``) of the class containing ``element``."""
        merged = self.merged()
        if merged is INFINITE:
            raise ValueError("class_index needs a finite Reidemeister number")
        uf, roots = merged
        return roots.index(uf.find(self._candidate_index(element)))


def reidemeister_filtered(group, endo, view=None):
    """R(ψ) for a filtered group, exact including a finite top quotient."""
    view = view or group.view()
    result = TwistedClasses(view, endo).result()
    logger.info(f"✅ Reidemeister number {result.count}")
    return result


def class_index(group, endo, element, view=None):
    return TwistedClasses(view or group.view(), endo).class_index(element)


def brute_force_coker(M, box_radius=None):
    """|Z^n / M Z^n| by flood fill on the discrete torus (Z/L)^n.

    L is the largest Smith invariant, so L Z^n lies inside the column
    lattice and the torus classes are exactly the cokernel classes. Every
    class is a translate of the class of 0, so the count is L^n divided by
    the size of that class.
    """
    M = M if isinstance(M, IntegerMatrix) else M.to_integer()
    classes = cokernel_classes(M)
    if not classes.is_finite:
        raise ValueError("brute_force_coker needs det(M) != 0")
    invariants = classes.smith.invariants
    L = max(invariants) if invariants else 1
    if box_radius is None:
        box_radius = 1 + L
    if box_radius < L:
        raise ValueError(f"box radius {box_radius} is smaller than the largest invariant {L}")
    n = M.rows
    columns = [tuple(c % L for c in M.column(j)) for j in range(M.cols)]
    moves = columns + [tuple((-c) % L for c in col) for col in columns]
    start = (0,) * n
    seen = {start}
    frontier = [start]
    while frontier:
        point = frontier.pop()
        for move in moves:
            nxt = tuple((a + b) % L for a, b in zip(point, move))
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return L ** n // len(seen)


@dataclass
class AdditionInequality:
    left: object
    right: object
    terms: list

    @property
    def ok(self):
        return count_leq(self.left, self.right)


def check_addition_inequality(group, subgroup_name, endo):
    """``R(ψ) <= Σ_x R((τ_x ∘ ψ)|_H)`` over the cosets x of the named subgroup H."""
    sub = group.subgroup(subgroup_name)
    h_view = group.subgroup_view(subgroup_name)
    for level, words in enumerate(h_view.level_words, start=1):
        for word in words:
            image = endo.image(group, word)
            if not h_view.contains(image):
                raise HypothesisViolation(
                    f"the endomorphism maps {word!r} outside {subgroup_name} (level {level})"
                )
    left = reidemeister_filtered(group, endo).count
    terms = []
    for word in sub.coset_reps:
        twisted = endo.twisted_by(group.element(word))
        terms.append((word, reidemeister_filtered(group, twisted, view=h_view).count))
    right = add_counts(*(c for _, c in terms))
    outcome = AdditionInequality(left, right, terms)
    if outcome.ok:
        logger.info(f"✅ addition inequality {left} <= {right}")
    else:
        logger.error(f"❌ addition inequality fails: {left} > {right}")
    return outcome
