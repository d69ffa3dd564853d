"""Exception types shared across the toolkit."""


class IpgError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(IpgError, ValueError):
    """A vector, matrix, or profile has a shape inconsistent with the game."""


class DistributionError(IpgError, ValueError):
    """Mixed-strategy probabilities are negative or do not sum to one."""


class InfeasibleStrategyError(IpgError):
    """A player's strategy set is empty where a best response is required."""


class MembershipError(IpgError):
    """A profile contains strategies outside the owner's strategy set."""


class KernelStallError(IpgError):
    """The simplex kernel exceeded its pivot cap without converging."""


class NodeLimitError(IpgError):
    """Branch and bound exhausted its node budget.

    Carries the best feasible point found so far, if any.
    """

    def __init__(self, message, incumbent_point=None, incumbent_value=None):
        super().__init__(message)
        self.incumbent_point = incumbent_point
        self.incumbent_value = incumbent_value


class TableCapacityError(IpgError):
    """A dynamic-programming table would exceed the configured cell cap."""


class EnumerationCapError(IpgError):
    """An exhaustive enumeration would exceed the configured size cap."""


class InstanceFormatError(IpgError, ValueError):
    """An instance document is malformed or fails schema validation."""


class SolverInternalError(IpgError):
    """An internal consistency check failed; indicates a bug, not bad input."""
