"""Exception hierarchy shared by all modules.

Every error raised on bad input derives from :class:`SingresError`; the CLI
maps :class:`DomainError` subclasses to exit code 1.
"""

from __future__ import annotations


class SingresError(Exception):
    """Base class for library errors."""


class DomainError(SingresError):
    """Input is outside the mathematical domain of an operation."""


class DimensionError(DomainError):
    """Shapes or lengths do not agree."""


class PreconditionError(DomainError):
    """A documented precondition does not hold."""


class IncompatibleExponentError(DomainError):
    """A rational exponential matrix produced a non-integral exponent."""


class ChartMismatchError(DomainError):
    """The supplied vertex is not minimal for the chart."""


class StructuralError(DomainError):
    """No admissible permutation or block structure exists."""


class SearchExhaustedError(DomainError):
    """A bounded deterministic search found no candidate."""


class ParameterError(DomainError):
    """A tuning parameter is out of range."""


class RoutingError(DomainError):
    """A node was passed to a step that does not handle its case."""


class UnsupportedDimensionError(DomainError):
    """The closed resolution loop only runs for n <= 3."""


class InvariantViolation(SingresError):
    """An internal invariant failed; this signals a bug, not bad input."""


class StepCap(SingresError):
    """The resolution loop reached its step limit."""
