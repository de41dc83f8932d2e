"""Exception types shared across the package."""


class ShortfallError(Exception):
    """Base class for all package errors."""


class DomainError(ShortfallError, ValueError):
    """An argument lies outside the region where a quantity is defined."""


class DivergenceError(DomainError):
    """A defining integral or constant is infinite for the given indices."""


class CapabilityError(ShortfallError):
    """Required metadata (e.g. second-order regular variation) is missing."""


class NumericalError(ShortfallError, ArithmeticError):
    """A numerical routine failed to reach its accuracy target."""


class AccuracyError(NumericalError):
    """Quadrature did not converge; ``estimate`` holds the partial result."""

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class BracketError(NumericalError):
    """Root bracketing failed."""
