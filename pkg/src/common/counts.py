"""Class counts that may be infinite.

Counts are plain ``int`` values or the ``INFINITE`` sentinel. Addition
saturates; multiplication by infinity is only defined for positive factors,
a zero factor times infinity is never formed by the callers.
"""


class _Infinite:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITE"

    def __str__(self):
        return "infinity"

    def __reduce__(self):
        return (_Infinite, ())


INFINITE = _Infinite()


def is_finite(count):
    return count is not INFINITE


def add_counts(*counts):
    total = 0
    for count in counts:
        if count is INFINITE:
            return INFINITE
        total += count
    return total


def multiply_counts(*counts):
    product = 1
    saw_infinite = False
    for count in counts:
        if count is INFINITE:
            saw_infinite = True
            continue
        if count < 0:
            raise ValueError("class counts are nonnegative")
        product *= count
    if saw_infinite:
        if product == 0:
            raise ValueError("0 * infinity is undefined")
        return INFINITE
    return product


def count_leq(left, right):
    """``left <= right`` with infinity as the top element."""
    if right is INFINITE:
        return True
    if left is INFINITE:
        return False
    return left <= right


def count_to_json(count):
    return "infinity" if count is INFINITE else str(count)


def nielsen_of_count(count):
    """Map a Reidemeister count on an NR cover to its Nielsen number (∞ ↦ 0)."""
    return 0 if count is INFINITE else count
