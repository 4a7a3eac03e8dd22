"""Words in named generators: ``"s^2 e1^-1 e3^k"``.

Exponents are integers, parameter names or negated parameter names; the
empty word (also written ``"1"`` or ``"id"``) is the identity.
"""
import re

from common.errors import SpecFileError

_TOKEN = re.compile(r"^([A-Za-z_][A-Za-z0-9_']*)(?:\^(-?)([A-Za-z_][A-Za-z0-9_]*|\d+))?$")
IDENTITY_WORDS = ("", "1", "id")


def parse_word(word, params=None, location="word"):
    """List of ``(generator, exponent)`` pairs with integer exponents."""
    params = params or {}
    word = word.strip()
    if word in IDENTITY_WORDS:
        return []
    letters = []
    for token in word.replace("*", " ").split():
        match = _TOKEN.match(token)
        if not match:
            raise SpecFileError(location, f"cannot parse {token!r} in word {word!r}")
        name, negative, exponent = match.groups()
        if exponent is None:
            value = 1
        elif exponent.isdigit():
            value = int(exponent)
        elif exponent in params:
            value = params[exponent]
            if int(value) != value:
                raise SpecFileError(location, f"exponent {exponent}={value} is not an integer")
            value = int(value)
        else:
            raise SpecFileError(location, f"unknown exponent {exponent!r} in word {word!r}")
        if negative:
            value = -value
        if value:
            letters.append((name, value))
    return letters


def format_word(letters):
    if not letters:
        return ""
    return " ".join(name if e == 1 else f"{name}^{e}" for name, e in letters)


def substitute_word(word, params, location="word"):
    """The word with parameter exponents replaced by their integer values."""
    return format_word(parse_word(word, params, location))


def word_from_vector(names, vector):
    """``names[0]^v[0] names[1]^v[1] ...`` (zero exponents dropped)."""
    return format_word([(n, int(v)) for n, v in zip(names, vector) if v])
