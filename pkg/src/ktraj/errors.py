"""Exception types raised by the trajectory toolkit."""


class KtrajError(Exception):
    """Base class; ``category`` is the machine-readable tag the CLI reports."""

    category = "error"


class DomainError(KtrajError, ValueError):
    category = "domain"


class InvalidInputError(KtrajError, ValueError):
    category = "invalid-input"


class InfeasibleDesign(KtrajError):
    """A readout cannot be traversed within the hardware limits.

    ``min_t_read`` holds the shortest readout duration (ms) that would make
    the design feasible, when it is known.
    """

    category = "infeasible-design"

    def __init__(self, message, min_t_read=None):
        super().__init__(message)
        self.min_t_read = min_t_read


class SearchFailure(KtrajError):
    category = "search-failure"


class AssemblyError(KtrajError):
    category = "assembly"


class BudgetExceeded(KtrajError):
    category = "budget"


class ConfigError(KtrajError, ValueError):
    category = "config"
