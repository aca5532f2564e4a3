"""Exception types shared across the package."""


class RBComError(Exception):
    """Base class for all package errors."""


class DomainError(RBComError, ValueError):
    """An argument lies outside the region where the model is defined."""


class SchemeInfeasible(RBComError, ValueError):
    """The amplitude-compensation scheme cannot hold (weight would exceed 1)."""

    def __init__(self, message, frame=None, slot=None):
        super().__init__(message)
        self.frame = frame
        self.slot = slot


class NumericalFailure(RBComError, RuntimeError):
    """A numerical procedure did not converge.

    ``bracket`` carries the last bracket (or other diagnostics) when available.
    """

    def __init__(self, message, bracket=None, **diagnostics):
        super().__init__(message)
        self.bracket = bracket
        self.diagnostics = diagnostics
