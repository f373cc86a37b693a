"""Exception hierarchy shared by every module."""


class BCMapError(Exception):
    """Base class for all errors raised by :mod:`bcmap`."""


class DomainError(BCMapError, ValueError):
    """A point lies outside the open unit disk (with the admission margin)."""


class PreconditionError(BCMapError, ValueError):
    """An operation was called outside its documented preconditions."""


class SingularInputError(PreconditionError):
    """Evaluation requested at (or numerically at) a singularity."""


class NumericalFailure(BCMapError, RuntimeError):
    """A numerical routine did not reach its stated tolerance."""


class BoundaryProximityError(NumericalFailure):
    """A target value lies too close to the image of a contour."""


class ParseError(BCMapError, ValueError):
    """Malformed input file. ``line`` is 1-based when known."""

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class DescentNotFound(BCMapError):
    """No descent witness within the depth budget; ``chain`` holds the squares found so far."""

    def __init__(self, message, chain=()):
        self.chain = list(chain)
        super().__init__(message)
