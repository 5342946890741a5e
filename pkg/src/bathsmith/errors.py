"""Exception types shared across the package."""


class BathsmithError(Exception):
    """Base class for package errors."""


class ValidationError(BathsmithError, ValueError):
    """Input document or parameter violates the schema or an invariant."""


class ConfigurationError(BathsmithError, ValueError):
    """Operation asked to run with an unusable configuration."""


class NumericError(BathsmithError, RuntimeError):
    """A numerical procedure failed to converge or lost precision."""


class BudgetError(BathsmithError, RuntimeError):
    """A requested computation exceeds the configured resource budget."""


class FitError(BathsmithError, RuntimeError):
    """All optimizer starts failed; carries the best residual found."""

    def __init__(self, message: str, best_objective: float | None = None):
        super().__init__(message)
        self.best_objective = best_objective
