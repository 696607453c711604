"""Exception types shared across the package."""


class PencilBVPError(Exception):
    """Base class for all package errors."""


class NotSymmetric(PencilBVPError):
    """Raised when a matrix expected to be symmetric is not."""


class NotPositiveDefinite(PencilBVPError):
    """Raised when an operator has an eigenvalue at or below zero."""


class NegativeTime(PencilBVPError):
    """Raised when a semigroup is evaluated at t < 0."""


class DimensionMismatch(PencilBVPError):
    """Raised when array shapes are inconsistent with the operator dimension."""


class GridTooSmall(PencilBVPError):
    """Raised when a grid has too few nodes for the requested stencil."""


class InadmissibleWeight(PencilBVPError):
    """Raised when |kappa| >= 2*lambda0, where the principal operator loses
    its bounded inverse."""


class ResidualTooLarge(PencilBVPError):
    """Raised when a solve leaves a residual above the discretization
    threshold.  Signals a grid failure, not a failure of the theory."""


class NotContractive(PencilBVPError):
    """Raised when the fixed-point iteration diverges."""


class BoundaryConditionViolated(PencilBVPError):
    """Raised when a verifier input does not satisfy its boundary condition."""


class NotInDomain(PencilBVPError):
    """Raised when a function fails the vanishing-trace requirement."""


class ConfigInvalid(PencilBVPError):
    """Raised when a CLI configuration file is missing or inconsistent."""
