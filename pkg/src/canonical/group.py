"""Groups of canonical-type maps, their subgroups and endomorphisms.

A ``GroupSpec`` names its generators as concrete maps; every other group
element (coset representatives, level generators, subgroup generators)
is a word evaluated by composition. ``FilteredView`` carries the level
structure that twisted-conjugacy computations walk through, and
``EndoSpec`` is an endomorphism given by a polynomial lift together with
the images of the named generators.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction

from common.errors import HypothesisViolation, SpecFileError, StructuralError
from exactla.matrices import RationalMatrix, det
from canonical.maps import (
    CanonicalMap,
    compose_maps,
    invert_map,
    linearisation,
    power_map,
)
from canonical.words import parse_word

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SubgroupSpec:
    """A finite-index subgroup given by coset representatives.

    ``assumption`` is the hypothesis the user asserts for it ("NR" or
    "net"); certification may still be attempted.
    """

    name: str
    coset_reps: tuple
    generators: tuple = ()
    level_generators: tuple = None
    fully_invariant: bool = False
    assumption: str = None

    @property
    def index(self):
        return len(self.coset_reps)


class GroupSpec:
    def __init__(self, filtration, generators, level_generators, top_reps=("",),
                 subgroups=None, name=""):
        self.filtration = filtration
        self.generators = dict(generators)
        self.level_generators = tuple(tuple(words) for words in level_generators)
        self.top_reps = tuple(top_reps)
        self.subgroups = dict(subgroups or {})
        self.name = name
        self._cache = {}
        if len(self.level_generators) != filtration.levels:
            raise StructuralError(
                f"{len(self.level_generators)} level generator lists for {filtration.levels} levels"
            )
        for level, words in enumerate(self.level_generators, start=1):
            if len(words) != filtration.block_dims[level - 1]:
                raise StructuralError(
                    f"level {level} needs {filtration.block_dims[level - 1]} generators, got {len(words)}"
                )

    @property
    def identity(self):
        return CanonicalMap.identity(self.filtration)

    def element(self, word):
        """The map of a word in the named generators."""
        if word not in self._cache:
            result = self.identity
            for name, exponent in parse_word(word):
                if name not in self.generators:
                    raise SpecFileError(f"word {word!r}", f"unknown generator {name!r}")
                result = compose_maps(result, power_map(self.generators[name], exponent))
            self._cache[word] = result
        return self._cache[word]

    def subgroup(self, name):
        if name not in self.subgroups:
            raise StructuralError(f"group has no subgroup {name!r}")
        return self.subgroups[name]

    def view(self):
        """The filtered structure of the group itself."""
        return FilteredView(self, self.level_generators, self.top_reps)

    def subgroup_view(self, name):
        """The filtered structure of a subgroup that lists its own level generators."""
        sub = self.subgroup(name)
        if sub.level_generators is None:
            raise StructuralError(f"subgroup {name} has no level generators")
        return FilteredView(self, sub.level_generators, ("",))

    def level_actions(self, words):
        """Per level, the diagonal blocks of the given elements (dict level -> {word: matrix})."""
        actions = {}
        for level in range(1, self.filtration.levels + 1):
            actions[level] = {w: self.element(w).block(level) for w in words}
        return actions


class FilteredView:
    """Level generators, their lattices and the finite top quotient."""

    def __init__(self, group, level_words, top_words):
        self.group = group
        self.filtration = group.filtration
        self.level_words = tuple(tuple(w) for w in level_words)
        self.top_words = tuple(top_words)
        self.level_maps = []
        self.bases = []
        for level, words in enumerate(self.level_words, start=1):
            maps = [group.element(w) for w in words]
            for word, m in zip(words, maps):
                if not m.is_level_translation(level):
                    raise StructuralError(
                        f"level {level} generator {word!r} is not a pure level-{level} translation"
                    )
            basis = RationalMatrix.from_rows(
                [[m.translation_at(level)[r] for m in maps] for r in range(len(maps))]
            )
            if det(basis) == 0:
                raise StructuralError(f"level {level} generators are linearly dependent")
            self.level_maps.append(maps)
            self.bases.append(basis)
        self.inverse_bases = [b.inverse() for b in self.bases]
        self.top_maps = [group.element(w) for w in self.top_words]

    @property
    def levels(self):
        return self.filtration.levels

    def basis(self, level):
        return self.bases[level - 1]

    def in_level_coordinates(self, level, matrix):
        """``L^-1 M L``: a level-block matrix written in the level generators' basis."""
        return self.inverse_bases[level - 1] @ matrix @ self.bases[level - 1]

    def level_element(self, level, vector):
        """``z_1^v_1 ... z_k^v_k`` for the level's generators z_j."""
        result = CanonicalMap.identity(self.filtration)
        for m, e in zip(self.level_maps[level - 1], vector):
            if e:
                result = compose_maps(result, power_map(m, int(e)))
        return result

    def coordinates(self, level, element):
        """Lattice coordinates of a pure level translation, or None."""
        if not element.is_level_translation(level):
            return None
        t = element.translation_at(level)
        coords = self.inverse_bases[level - 1].apply(t)
        if any(Fraction(c).denominator != 1 for c in coords):
            return None
        return tuple(int(c) for c in coords)

    def decompose(self, element, start_level=1):
        """Peel level translations off ``element``; None when it is not in the subgroup."""
        vectors = []
        current = element
        for level in range(start_level, self.levels + 1):
            coords = self.coordinates(level, current)
            if coords is None:
                return None
            vectors.append(coords)
            current = compose_maps(current, invert_map(self.level_element(level, coords)))
        return vectors if current.is_identity() else None

    def contains(self, element, start_level=1):
        return self.decompose(element, start_level) is not None

    def coset_index(self, element):
        """Index i of the top representative with ``element ∘ x_i^-1`` in the filtered part."""
        for i, rep in enumerate(self.top_maps):
            if self.contains(compose_maps(element, invert_map(rep))):
                return i
        raise StructuralError(f"element {element.format()} lies in no listed top coset")


class EndoSpec:
    """``ψ = τ_c ∘ φ`` where φ has lift p and generator images; c defaults to 1.

    The effective lift is ``c ∘ p``; ``twisted_by(g)`` replaces c by g∘c.
    """

    def __init__(self, lift, images, conjugator=None, name=""):
        self.base_lift = lift
        self.images = dict(images)
        self.conjugator = conjugator or CanonicalMap.identity(lift.filtration)
        self.name = name
        self._word_cache = {}

    @property
    def lift(self):
        if self.conjugator.is_identity():
            return self.base_lift
        return compose_maps(self.conjugator, self.base_lift)

    @property
    def blocks(self):
        return linearisation(self.lift)

    def twisted_by(self, element):
        return EndoSpec(
            self.base_lift,
            self.images,
            compose_maps(element, self.conjugator),
            self.name,
        )

    def base_image(self, group, word):
        """φ(word), ignoring the conjugator."""
        if word not in self._word_cache:
            result = group.identity
            for name, exponent in parse_word(word):
                if name not in self.images:
                    raise SpecFileError("endomorphism.images", f"no image for generator {name!r}")
                result = compose_maps(result, power_map(self.images[name], exponent))
            self._word_cache[word] = result
        return self._word_cache[word]

    def image(self, group, word):
        """ψ(word) = c φ(word) c^-1."""
        base = self.base_image(group, word)
        if self.conjugator.is_identity():
            return base
        return compose_maps(compose_maps(self.conjugator, base), invert_map(self.conjugator))

    def image_of_level_element(self, view, level, vector):
        """ψ(z_1^v_1 ... z_k^v_k) for the view's level generators."""
        result = view.group.identity
        for word, e in zip(view.level_words[level - 1], vector):
            if e:
                result = compose_maps(result, power_map(self.image(view.group, word), int(e)))
        return result

    def equivariance_failures(self, group):
        """Generators γ with ``p ∘ ρ(γ) != ρ(φ(γ)) ∘ p``."""
        failures = []
        for name, g in sorted(group.generators.items()):
            if name not in self.images:
                failures.append(name)
                continue
            left = compose_maps(self.base_lift, g)
            right = compose_maps(self.images[name], self.base_lift)
            if left != right:
                failures.append(name)
        return failures

    def level_matrix(self, view, level):
        """Induced map on the level lattice, in the view's basis; must be integral."""
        matrix = view.in_level_coordinates(level, self.lift.block(level))
        if not matrix.is_integral():
            raise HypothesisViolation(
                f"endomorphism does not preserve the level-{level} lattice (induced matrix {matrix})"
            )
        return matrix.to_integer()


@dataclass
class HypothesisStatus:
    """Outcome of checking a formula's hypothesis: certified, asserted, conditional or refuted."""

    subject: str
    status: str
    detail: str = ""
    certification: object = field(default=None, repr=False)

    @property
    def downgraded(self):
        return self.status in ("asserted", "conditional")
