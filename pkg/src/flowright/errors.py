"""Exception types shared across the package."""


class FlowrightError(Exception):
    """Base class for all package-specific errors."""


class DomainError(FlowrightError, ValueError):
    """An argument lies outside the mathematical domain of a rate function."""


class InvalidInstance(FlowrightError, ValueError):
    """A problem instance violates a structural invariant."""


class InvalidUnits(FlowrightError, ValueError):
    """A physical-unit description is incomplete or non-positive."""


class Infeasible(FlowrightError):
    """The harvested energy cannot deliver the requested bits in finite time."""

    def __init__(self, message: str, deficit: float = 0.0):
        super().__init__(message)
        self.deficit = deficit


class NotEnoughEnergy(FlowrightError):
    """A bounded-window transmission-time solve has no root: the energy
    budget cannot move the requested bits within the window."""


class InconsistentBudget(FlowrightError):
    """No rate split satisfies the bit totals under the pinned energy
    assignment of a two-epoch local optimization."""


class MaxItersExceeded(FlowrightError):
    """The sweep loop hit its iteration cap before converging.

    Carries the best schedule and the diagnostics collected so far.
    """

    def __init__(self, message: str, schedule=None, diagnostics=None):
        super().__init__(message)
        self.schedule = schedule
        self.diagnostics = diagnostics


class TooLarge(FlowrightError, ValueError):
    """The instance exceeds the brute-force oracle's harvest limit."""
