"""Exception types shared across the package."""


class RenormError(Exception):
    """Base class for all package errors."""


class RepresentationError(RenormError):
    """A body representation is missing, empty, or inconsistent."""


class UnboundedBodyError(RepresentationError):
    """An H-representation does not bound the body (normals do not span)."""


class LowerDimensionalBodyError(RepresentationError):
    """A V-representation spans a proper subspace; treat it as a section."""


class ParameterError(RenormError, ValueError):
    """A numeric parameter is outside its admissible range."""


class InvariantError(RenormError):
    """A construction produced an object violating a certified identity.

    Raised when an exact check that must hold by construction fails,
    which indicates a bug upstream rather than bad user input.
    """


class DomainError(RenormError, ValueError):
    """An evaluation was requested outside the operation's domain."""


class ToleranceNotMetError(RenormError):
    """An iterative solver stopped before reaching the requested tolerance."""

    def __init__(self, message: str, achieved_gap: float):
        super().__init__(message)
        self.achieved_gap = achieved_gap
