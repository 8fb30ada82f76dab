"""Exception types shared across the package."""


class PfstarError(Exception):
    """Base class for errors raised by this package."""


class DescriptorMismatch(PfstarError):
    """Operands belong to different group descriptors."""


class WordParseError(PfstarError):
    """A word literal failed to parse; carries the offending position."""

    def __init__(self, message, position):
        super().__init__(f"{message} (position {position})")
        self.position = position


class BudgetExceeded(PfstarError):
    """A configured resource budget (vertices, terms, word length) ran out.

    ``reached`` reports how far the computation got (radius, power index,
    or term count depending on the caller).
    """

    def __init__(self, message, reached=None):
        super().__init__(message)
        self.reached = reached


class OutOfBall(PfstarError):
    """A coset fell outside the enumerated Schreier ball."""


class BoundContradiction(PfstarError):
    """A certified lower bound exceeded a certified upper bound: a bug."""
