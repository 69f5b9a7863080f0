"""Exception hierarchy.

Configuration and domain problems map to CLI exit status 2, numerical
problems to exit status 3.
"""


class CovsigError(Exception):
    """Base class for all package errors."""


class DomainError(CovsigError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigurationError(CovsigError, ValueError):
    """A configured limit (degree cap, sweep size, ...) is exceeded."""


class DegenerateBackgroundError(DomainError):
    """Willie sees no thermal background, so the QRE coefficient is infinite."""


class ShapeError(CovsigError, ValueError):
    """Two distributions that must share a truncation do not."""


class NumericalError(CovsigError, ArithmeticError):
    """A numerical routine failed to reach its accuracy guarantee."""


class NumericalInstabilityError(NumericalError):
    """A computed probability fell outside [0, 1] beyond round-off."""


class QuadratureError(NumericalError):
    """Node doubling did not converge."""


class DivergenceError(NumericalError):
    """A chi-square series diverges, the expansion coefficient is infinite."""


class InvalidStateError(NumericalError):
    """A covariance matrix violates the uncertainty principle."""
