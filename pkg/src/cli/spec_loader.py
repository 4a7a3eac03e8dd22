"""Spec files: JSON descriptions of a group, its subgroups and an endomorphism.

A map is written level by level::

    {"levels": [{"block": [["c"]]},
                {"block": [["a"]], "translation": ["1/2"], "tail": [[{"c": "3", "e": [2, 0]}]]}]}

``block`` defaults to the identity, ``translation`` to zero, and ``tail``
lists extra terms per coordinate (coefficient ``c``, exponent vector
``e`` over all h variables). Coefficients are integers or strings holding
rationals or expressions in the declared parameters.
"""
import json
import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction

import sympy
from jsonschema import Draft202012Validator

from common.errors import DimensionError, NielsenError, SpecFileError
from exactla.matrices import RationalMatrix
from qpoly.multipoly import MultiPoly
from canonical.filtration import Filtration
from canonical.group import EndoSpec, GroupSpec, SubgroupSpec
from canonical.maps import CanonicalMap, validate_canonical
from canonical.words import parse_word, substitute_word

logger = logging.getLogger(__name__)

TOKEN = re.compile(r"\s*(?:([A-Za-z_][A-Za-z0-9_]*)|(\d+)|([-+*/()]))")

SPEC_VERSION = "nielsen-spec/1"

_COEFFICIENT = {"oneOf": [{"type": "integer"}, {"type": "string", "minLength": 1}]}
_TERM = {
    "type": "object",
    "required": ["c", "e"],
    "properties": {
        "c": _COEFFICIENT,
        "e": {"type": "array", "items": {"type": "integer", "minimum": 0}},
    },
    "additionalProperties": False,
}
_LEVEL = {
    "type": "object",
    "properties": {
        "block": {"type": "array", "items": {"type": "array", "items": _COEFFICIENT}},
        "translation": {"type": "array", "items": _COEFFICIENT},
        "tail": {"type": "array", "items": {"type": "array", "items": _TERM}},
    },
    "additionalProperties": False,
}
_MAP = {
    "type": "object",
    "required": ["levels"],
    "properties": {"levels": {"type": "array", "items": _LEVEL, "minItems": 1}},
    "additionalProperties": False,
}
_WORDS = {"type": "array", "items": {"type": "string"}}
_SUBGROUP = {
    "type": "object",
    "required": ["coset_reps"],
    "properties": {
        "coset_reps": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "index": {"type": "integer", "minimum": 1},
        "generators": _WORDS,
        "level_generators": {"type": "array", "items": _WORDS},
        "fully_invariant": {"type": "boolean"},
        "assumption": {"enum": ["NR", "net"]},
    },
    "additionalProperties": False,
}

SPEC_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["version", "filtration", "generators", "level_generators", "endomorphism"],
    "properties": {
        "version": {"const": SPEC_VERSION},
        "name": {"type": "string"},
        "description": {"type": "string"},
        "parameters": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "required": ["default"],
                "properties": {"default": _COEFFICIENT, "description": {"type": "string"}},
                "additionalProperties": False,
            },
        },
        "filtration": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
        "generators": {"type": "object", "minProperties": 1, "additionalProperties": _MAP},
        "level_generators": {"type": "array", "items": _WORDS, "minItems": 1},
        "top_reps": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "subgroups": {"type": "object", "additionalProperties": _SUBGROUP},
        "endomorphism": {
            "type": "object",
            "required": ["lift", "images"],
            "properties": {
                "lift": _MAP,
                "images": {"type": "object", "additionalProperties": {"oneOf": [{"type": "string"}, _MAP]}},
            },
            "additionalProperties": False,
        },
        "notes": {"type": "array", "items": {"type": "string"}},
    },
    "additionalProperties": False,
}


@dataclass
class SpecFile:
    name: str
    params: dict
    group: GroupSpec
    endo: EndoSpec
    image_words: dict = field(default_factory=dict)
    description: str = ""
    notes: list = field(default_factory=list)
    path: str = None


def check_schema(data):
    validator = Draft202012Validator(SPEC_SCHEMA)
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        first = errors[0]
        location = "/".join(str(p) for p in first.absolute_path) or "<root>"
        raise SpecFileError(location, first.message)


def check_expression(text, params, location):
    """Only integers, + - * / ( ) and declared parameter names may appear in a coefficient."""
    position = 0
    text = text.rstrip()
    while position < len(text):
        match = TOKEN.match(text, position)
        if match is None:
            raise SpecFileError(location, f"unexpected character in {text!r} at {position}")
        name = match.group(1)
        if name is not None and name not in params:
            raise SpecFileError(location, f"unknown name {name!r} in {text!r}")
        position = match.end()


def parse_rational(value, params, location):
    """An exact rational from an int or a string expression in the parameters."""
    if isinstance(value, bool):
        raise SpecFileError(location, f"{value!r} is not a number")
    if isinstance(value, int):
        return Fraction(value)
    text = str(value)
    check_expression(text, params, location)
    symbols = {name: sympy.Rational(v.numerator, v.denominator) for name, v in params.items()}
    try:
        expr = sympy.sympify(text, locals=symbols)
    except Exception as e:
        raise SpecFileError(location, f"cannot parse {value!r}: {e}")
    if not isinstance(expr, sympy.Basic) or not expr.is_Rational:
        raise SpecFileError(location, f"{value!r} does not evaluate to a rational number")
    return Fraction(int(expr.p), int(expr.q))


def resolve_params(declared, overrides=None):
    params = {}
    for name, entry in sorted((declared or {}).items()):
        params[name] = parse_rational(entry["default"], params, f"parameters/{name}")
    for name, value in (overrides or {}).items():
        if name not in params:
            raise SpecFileError("parameters", f"unknown parameter {name!r}")
        params[name] = parse_rational(value, {}, f"--param {name}")
    return params


def parse_map(data, filtration, params, location):
    h = filtration.dimension
    levels = data["levels"]
    if len(levels) != filtration.levels:
        raise SpecFileError(location, f"{len(levels)} levels given, filtration has {filtration.levels}")
    blocks, tails = [], []
    for level, entry in enumerate(levels, start=1):
        where = f"{location}/levels/{level - 1}"
        k = filtration.block_dims[level - 1]
        if "block" in entry:
            rows = entry["block"]
            if len(rows) != k or any(len(r) != k for r in rows):
                raise SpecFileError(f"{where}/block", f"expected a {k}x{k} block at level {level}")
            blocks.append(RationalMatrix.from_rows(
                [[parse_rational(v, params, f"{where}/block") for v in r] for r in rows]
            ))
        else:
            blocks.append(None)
        translation = entry.get("translation", [0] * k)
        if len(translation) != k:
            raise SpecFileError(f"{where}/translation", f"expected {k} entries at level {level}")
        tail_terms = entry.get("tail", [[] for _ in range(k)])
        if len(tail_terms) != k:
            raise SpecFileError(f"{where}/tail", f"expected {k} term lists at level {level}")
        tail = []
        for r in range(k):
            poly = MultiPoly.constant(h, parse_rational(translation[r], params, f"{where}/translation"))
            for term in tail_terms[r]:
                if len(term["e"]) != h:
                    raise SpecFileError(f"{where}/tail/{r}", f"exponent vector of length {len(term['e'])}, need {h}")
                coefficient = parse_rational(term["c"], params, f"{where}/tail/{r}")
                poly = poly + MultiPoly(h, {tuple(term["e"]): coefficient})
            tail.append(poly)
        tails.append(tail)
    try:
        return CanonicalMap.from_levels(filtration, blocks, tails)
    except DimensionError as e:
        raise SpecFileError(location, str(e))


def _check_canonical(f, location, as_group_element):
    report = validate_canonical(f, as_group_element=as_group_element)
    if not report.ok:
        violation = report.first()
        raise SpecFileError(f"{location}/levels/{violation.level - 1}", str(violation))


def load_spec_data(data, overrides=None, path=None):
    """Validate a decoded spec file and build the group and endomorphism."""
    check_schema(data)
    params = resolve_params(data.get("parameters"), overrides)
    filtration = Filtration(tuple(data["filtration"]))

    generators = {}
    for name in sorted(data["generators"]):
        location = f"generators/{name}"
        generators[name] = parse_map(data["generators"][name], filtration, params, location)
        _check_canonical(generators[name], location, as_group_element=True)

    def words(values, location):
        return tuple(substitute_word(w, params, location) for w in values)

    subgroups = {}
    for name, entry in sorted(data.get("subgroups", {}).items()):
        location = f"subgroups/{name}"
        reps = words(entry["coset_reps"], f"{location}/coset_reps")
        if "index" in entry and entry["index"] != len(reps):
            raise SpecFileError(f"{location}/index", f"index {entry['index']} but {len(reps)} coset representatives")
        level_gens = entry.get("level_generators")
        subgroups[name] = SubgroupSpec(
            name=name,
            coset_reps=reps,
            generators=words(entry.get("generators", []), f"{location}/generators"),
            level_generators=tuple(words(w, f"{location}/level_generators") for w in level_gens)
            if level_gens is not None else None,
            fully_invariant=entry.get("fully_invariant", False),
            assumption=entry.get("assumption"),
        )

    try:
        group = GroupSpec(
            filtration,
            generators,
            [words(w, "level_generators") for w in data["level_generators"]],
            words(data.get("top_reps", [""]), "top_reps"),
            subgroups,
            name=data.get("name", ""),
        )
        for name, sub in subgroups.items():
            if not group.element(sub.coset_reps[0]).is_identity():
                raise SpecFileError(f"subgroups/{name}/coset_reps/0", "first coset representative must be the identity")
            for word in sub.generators:
                group.element(word)
        if not group.element(group.top_reps[0]).is_identity():
            raise SpecFileError("top_reps/0", "first top representative must be the identity")
        group.view()
    except SpecFileError:
        raise
    except NielsenError as e:
        raise SpecFileError("level_generators", str(e))

    endo_data = data["endomorphism"]
    lift = parse_map(endo_data["lift"], filtration, params, "endomorphism/lift")
    _check_canonical(lift, "endomorphism/lift", as_group_element=False)
    images, image_words = {}, {}
    for name in sorted(generators):
        location = f"endomorphism/images/{name}"
        if name not in endo_data["images"]:
            raise SpecFileError(location, "missing image")
        value = endo_data["images"][name]
        if isinstance(value, str):
            word = substitute_word(value, params, location)
            for letter, _ in parse_word(word):
                if letter not in generators:
                    raise SpecFileError(location, f"unknown generator {letter!r}")
            image_words[name] = word
            images[name] = group.element(word)
        else:
            images[name] = parse_map(value, filtration, params, location)
            _check_canonical(images[name], location, as_group_element=False)
    extra = sorted(set(endo_data["images"]) - set(generators))
    if extra:
        raise SpecFileError(f"endomorphism/images/{extra[0]}", "image for an unknown generator")
    endo = EndoSpec(lift, images, name=data.get("name", ""))
    failures = endo.equivariance_failures(group)
    if failures:
        raise SpecFileError(
            f"endomorphism/images/{failures[0]}",
            "lift is not equivariant: p ∘ ρ(γ) != ρ(φ(γ)) ∘ p",
        )
    spec = SpecFile(
        name=data.get("name", ""),
        params=params,
        group=group,
        endo=endo,
        image_words=image_words,
        description=data.get("description", ""),
        notes=list(data.get("notes", [])),
        path=path,
    )
    logger.info(f"✅ loaded {spec.name or path} with parameters {format_params(params)}")
    return spec


def load_and_validate(path, overrides=None):
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except OSError as e:
        raise SpecFileError(str(path), f"cannot read spec file: {e}")
    except json.JSONDecodeError as e:
        raise SpecFileError(f"{path}:{e.lineno}:{e.colno}", e.msg)
    logger.debug(f"📄 read {path}")
    return load_spec_data(data, overrides, path=str(path))


def format_params(params):
    return ", ".join(f"{k}={_number(v)}" for k, v in sorted(params.items())) or "none"


def parse_param_overrides(values):
    """``("k=2", "a=-1,c=-1")`` -> ``{"k": "2", "a": "-1", "c": "-1"}``."""
    out = {}
    for value in values or ():
        for item in value.split(","):
            if not item.strip():
                continue
            if "=" not in item:
                raise SpecFileError("--param", f"expected name=value, got {item!r}")
            name, _, raw = item.partition("=")
            out[name.strip()] = raw.strip()
    return out


def _number(value):
    value = Fraction(value)
    return value.numerator if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def serialize_map(f):
    levels = []
    for level in range(1, f.filtration.levels + 1):
        entry = {}
        block = f.block(level)
        if not block.is_identity():
            entry["block"] = [[_number(v) for v in row] for row in block.to_rows()]
        translation = f.translation_at(level)
        if any(translation):
            entry["translation"] = [_number(v) for v in translation]
        tail = []
        for poly in f.tail(level):
            tail.append([
                {"c": _number(c), "e": list(e)} for e, c in poly.terms() if any(e)
            ])
        if any(tail):
            entry["tail"] = tail
        levels.append(entry)
    return {"levels": levels}


def serialize(spec):
    """Canonical JSON-ready form of a loaded spec with its parameters substituted."""
    group, endo = spec.group, spec.endo
    data = {"version": SPEC_VERSION}
    if spec.name:
        data["name"] = spec.name
    if spec.description:
        data["description"] = spec.description
    if spec.params:
        data["parameters"] = {k: {"default": _number(v)} for k, v in sorted(spec.params.items())}
    data["filtration"] = list(group.filtration.block_dims)
    data["generators"] = {name: serialize_map(group.generators[name]) for name in sorted(group.generators)}
    data["level_generators"] = [list(words) for words in group.level_generators]
    data["top_reps"] = list(group.top_reps)
    if group.subgroups:
        data["subgroups"] = {}
        for name in sorted(group.subgroups):
            sub = group.subgroups[name]
            entry = {"coset_reps": list(sub.coset_reps), "generators": list(sub.generators)}
            if sub.level_generators is not None:
                entry["level_generators"] = [list(w) for w in sub.level_generators]
            entry["fully_invariant"] = sub.fully_invariant
            if sub.assumption:
                entry["assumption"] = sub.assumption
            data["subgroups"][name] = entry
    data["endomorphism"] = {
        "lift": serialize_map(endo.base_lift),
        "images": {
            name: spec.image_words[name] if name in spec.image_words else serialize_map(endo.images[name])
            for name in sorted(endo.images)
        },
    }
    if spec.notes:
        data["notes"] = list(spec.notes)
    return data
