"""Exception hierarchy shared by every package under src/."""


class NielsenError(Exception):
    """Base class for all errors raised by this library."""


class DimensionError(NielsenError, ValueError):
    """Non-square input or mismatched sizes."""


class ArityError(NielsenError, ValueError):
    """Polynomials with different variable counts were combined."""


class FiltrationMismatch(NielsenError, ValueError):
    """Two canonical maps live on different filtrations."""


class NotInvertible(NielsenError, ArithmeticError):
    def __init__(self, level, message=None):
        self.level = level
        super().__init__(message or f"diagonal block at level {level} is singular")


class NonCommutingGenerators(NielsenError, ValueError):
    def __init__(self, level, first, second):
        self.level = level
        self.pair = (first, second)
        super().__init__(
            f"generators {first} and {second} do not commute at level {level}"
        )


class HypothesisViolation(NielsenError):
    """The input contradicts a hypothesis of the formula being evaluated."""


class InconsistentResult(NielsenError):
    """Two exact computations that must agree did not."""


class StructuralError(NielsenError):
    """The input data does not have the shape the computation needs."""


class SpecFileError(NielsenError):
    def __init__(self, location, message):
        self.location = location
        super().__init__(f"{location}: {message}")
