"""Exception hierarchy shared by all modules."""


class LoopStrataError(Exception):
    """Base class for every error raised by the package."""


class InvalidCartanData(LoopStrataError):
    pass


class UnsupportedSigma(LoopStrataError):
    pass


class ConventionBroken(LoopStrataError):
    """A runtime self-check on the multiplication convention failed."""


class BudgetExceeded(LoopStrataError):
    pass


class TorsionUnsupported(LoopStrataError):
    pass


class NoUniqueMaximum(LoopStrataError):
    pass


class NotFound(LoopStrataError):
    pass


class NotUnique(LoopStrataError):
    pass


class IterationCapExceeded(LoopStrataError):
    pass


class NoWitness(LoopStrataError):
    pass


class InsufficientPrecision(LoopStrataError):
    def __init__(self, message, required=None):
        super().__init__(message)
        self.required = required


class NotInCoset(LoopStrataError):
    pass


class Inconclusive(LoopStrataError):
    pass


class NotMinimalType(LoopStrataError):
    pass


class InvalidSlopes(LoopStrataError):
    pass


class ParseError(LoopStrataError):
    def __init__(self, message, position=None, expected=None):
        if position is not None:
            message = f"{message} at position {position}"
            if expected:
                message += f" (expected {expected})"
        super().__init__(message)
        self.position = position
        self.expected = expected
