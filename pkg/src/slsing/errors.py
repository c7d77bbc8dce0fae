"""Exception types shared across the package."""


class ValidationError(ValueError):
    """A constructed object violates one of its invariants."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class RegimeError(ValueError):
    """Asymptotic formula evaluated outside its validity regime."""


class OverflowBudgetError(ValueError):
    """|Im omega| * pi exceeds the configured floating-point exponent budget."""


class ToleranceError(RuntimeError):
    """Step control or iteration could not meet the requested tolerance."""


class ConvergenceError(RuntimeError):
    """Root polishing did not converge within the iteration cap."""


class BoundaryCollisionError(RuntimeError):
    """A counting threshold sits too close to an eigenvalue."""


class UnsupportedPotentialError(RuntimeError):
    """Potential outside the supported spectral regime (e.g. bound states)."""


class BoundaryZeroError(RuntimeError):
    """A zero of the function lies (numerically) on a counting contour."""


class CountMismatchError(RuntimeError):
    """Located zeros disagree with the argument-principle count."""


class InsufficientDataError(ValueError):
    """Not enough eigenvalues for the requested analysis."""
