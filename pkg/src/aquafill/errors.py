"""Exception types raised across the package.

Two families matter to callers: :class:`ValidationError` for malformed input
(the CLI maps these to exit code 1) and :class:`GuardError` for inputs that are
well formed but exceed a configured computational guard (exit code 2).
"""


class AquafillError(Exception):
    """Base class for all package errors."""


class ValidationError(AquafillError, ValueError):
    """Input violates a documented precondition."""


class GuardError(AquafillError):
    """Input is valid but exceeds a computational guard."""


class UnequalLength(ValidationError):
    pass


class UnequalSums(ValidationError):
    pass


class EmptyNeighborhood(ValidationError):
    pass


class NonpositiveQuantity(ValidationError):
    pass


class IndexOutOfRange(ValidationError):
    pass


class NotNested(ValidationError):
    pass


class DegenerateOutput(ValidationError):
    """A transformation would produce an arrival with no neighbors."""


class InvalidParameter(ValidationError):
    pass


class UnknownObjective(ValidationError):
    pass


class NotConcaveNondecreasing(ValidationError):
    pass


class NotHomogeneous(ValidationError):
    pass


class UnsupportedDimension(ValidationError):
    pass


class PolicyInfeasibleOutput(AquafillError):
    """A policy returned an allocation outside the per-arrival simplex."""


class InstanceTooLarge(GuardError):
    pass


class ExactUnavailable(GuardError):
    """Exact expectation requested for a policy without finite support."""
