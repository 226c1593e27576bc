"""Exception types shared across the toolkit."""


class HelegeoError(Exception):
    """Base class for all toolkit errors."""


class DomainError(HelegeoError):
    """An argument lies outside the mathematical domain of an operation."""


class ScenarioError(HelegeoError):
    """A scenario specification is invalid or produces an invalid geometry."""


class NumericError(HelegeoError):
    """An iterative or quadrature computation failed to reach its tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class DataError(HelegeoError):
    """Input data violates a structural assumption (e.g. concavity in t)."""
