"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Input data violates a documented precondition."""


class InvalidRoutingError(ValidationError):
    """Routing matrix is negative, non-finite or has spectral radius >= 1."""


class ModelError(ValidationError):
    """A stochastic model specification is inconsistent (e.g. a bad rate matrix)."""


class ConvergenceError(RuntimeError):
    """An iterative solver failed to converge within its iteration budget."""
