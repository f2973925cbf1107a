"""Exception hierarchy shared across the simulator."""


class PorogrowthError(Exception):
    """Base class for all simulator errors."""


class InvalidDomainError(PorogrowthError):
    """Mesh construction rejected (nonpositive length, too few nodes)."""


class InvalidInitialConditionError(PorogrowthError):
    """Initial profiles violate the fluid-fraction closure."""


class ClosureViolationError(PorogrowthError):
    """Fluid fraction left the admissible open interval (0, 1)."""


class NonphysicalStateError(PorogrowthError):
    """A state failed a physical admissibility check mid-solve."""


class SingularPermeabilityError(PorogrowthError):
    """Permeability evaluated at phi_fl >= 1 where it is singular."""


class DegenerateDiffusivityError(PorogrowthError):
    """Effective nutrient diffusivity denominator became nonpositive."""


class InvalidProblemError(PorogrowthError):
    """An ADR problem definition is inconsistent (e.g. D <= 0)."""


class SingularSystemError(PorogrowthError):
    """Direct linear solve hit a (numerically) singular matrix."""


class NonConvergenceError(PorogrowthError):
    """Fixed-point iteration exhausted its budget.

    Carries the iteration report so callers can inspect residual history
    and decide on a time-step bisection retry.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class ConfigError(PorogrowthError):
    """Configuration text could not be parsed or violates an invariant."""
