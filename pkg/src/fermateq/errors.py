"""Exception types shared across the package."""


class FermateqError(Exception):
    """Base class for every error raised by this package."""


class DomainError(FermateqError):
    """Input outside the domain of an operation (non-finite, too close to a pole)."""


class ParameterError(FermateqError):
    """A constant fails its side condition."""


class DegeneratePairError(FermateqError):
    """A formula denominator vanishes for the given arguments."""


class NotASolutionError(FermateqError):
    """A candidate inner function fails the functional relation it must satisfy."""


class ClassificationError(NotASolutionError):
    """A measured shift offset matches none of the recognized cases."""


class ContourError(FermateqError):
    """A contour touches a singularity or the integral fails to stabilize."""


class InconclusiveOrderError(FermateqError):
    """The argument-principle integral is not close to an integer."""


class ConstructionError(FermateqError):
    """Context construction failed (root search did not converge)."""
