"""Exception hierarchy shared across the package."""


class EntmonoError(Exception):
    """Base class for all package errors."""


class DimMismatch(EntmonoError, ValueError):
    pass


class NotHermitian(EntmonoError, ValueError):
    pass


class NotPSD(EntmonoError, ValueError):
    pass


class NoConvergence(EntmonoError, RuntimeError):
    """Iterative solver gave up. ``best`` holds the last usable iterate, if any."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class DomainError(EntmonoError, ValueError):
    pass


class SpectrumInvalid(EntmonoError, ValueError):
    pass


class InvalidState(EntmonoError, ValueError):
    pass


class Unsupported(EntmonoError, ValueError):
    pass


class Singular(EntmonoError, ValueError):
    pass


class DegenerateCounts(EntmonoError, ValueError):
    pass


class ParseError(EntmonoError, ValueError):
    pass
