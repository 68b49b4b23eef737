"""Exception hierarchy shared across the package."""


class DrSubmaxError(Exception):
    """Base class for all package errors."""


class NumericalError(DrSubmaxError):
    """A numerical routine broke down (singular system, bad pivot, ...)."""


class NotSPDError(NumericalError):
    """Matrix is not symmetric positive definite."""


class LPInfeasibleError(DrSubmaxError):
    """The linear program has no feasible point."""


class LPUnboundedError(NumericalError):
    """The linear program is unbounded.

    Cannot happen for the box-bounded programs built by the LMOs, so it is
    treated as an internal numerical failure.
    """


class InfeasiblePointError(DrSubmaxError):
    """A point required to be feasible is not."""


class ProjectionError(NumericalError):
    """Dykstra's projection did not converge."""

    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


class SchemaError(DrSubmaxError):
    """Malformed or incompatible serialized file."""
