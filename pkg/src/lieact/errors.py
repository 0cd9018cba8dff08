"""Exception hierarchy shared by all modules."""


class LieActError(Exception):
    """Base class for every error raised by this package."""


class UsageError(LieActError, ValueError):
    """Caller passed incompatible or malformed arguments."""


class NotInGroupError(UsageError):
    """A matrix does not satisfy the defining relations of its group."""


class NumericalDegradationError(LieActError, ArithmeticError):
    """A computed group element drifted off the group beyond tolerance."""


class ChartDomainError(LieActError, ValueError):
    """A point lies outside the domain of a local chart."""


class DomainError(LieActError, ValueError):
    """A manifold point violates its domain predicate.

    ``exit_time`` is set when the violation happened during flow integration.
    """

    def __init__(self, message, exit_time=None):
        super().__init__(message)
        self.exit_time = exit_time


class ConstructionError(LieActError, ValueError):
    """A cross-section or flat chart cannot be built at the requested point."""


class ConfigError(LieActError, ValueError):
    """Invalid run configuration (unknown action, bad key, bad value)."""
