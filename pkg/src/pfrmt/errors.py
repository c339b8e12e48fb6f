"""Exception hierarchy shared by all modules.

Validation problems (bad shapes, out-of-domain arguments) derive from
``ValidationError``; failures of a numerical procedure on valid input derive
from ``NumericalError``.  The CLI maps the two families to exit codes 1 and 2.
"""


class PfrmtError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(PfrmtError, ValueError):
    pass


class DimensionError(ValidationError):
    pass


class DomainError(ValidationError):
    pass


class SeparationError(ValidationError):
    """Arguments closer than the separation threshold."""


class UnsupportedError(ValidationError):
    pass


class NumericalError(PfrmtError, ArithmeticError):
    pass


class SingularBlockError(NumericalError):
    pass


class IntegrationError(NumericalError):
    pass


class ConditioningError(NumericalError):
    pass


class AssemblyError(NumericalError):
    """An assembled matrix violates a structural property it must have."""


class ConsistencyError(NumericalError):
    """An internal dual-route identity failed."""
