"""Exception types shared across the package."""

from __future__ import annotations


class IdentityViolation(ValueError):
    """An identity that should hold numerically was violated beyond tolerance."""

    def __init__(self, what: str, max_dev: float, tol: float):
        super().__init__(f"{what}: max deviation {max_dev:.3e} exceeds tolerance {tol:.1e}")
        self.what = what
        self.max_dev = float(max_dev)
        self.tol = float(tol)


class ExpressionError(ValueError):
    """Syntax or name error in a field expression, with a 1-based position."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class EvaluationError(ArithmeticError):
    """Raised when a parsed expression cannot be evaluated (e.g. division by zero)."""


class FitConditioningError(ValueError):
    """The large-scale expansion fit is under-resolved or ill-conditioned."""


class ConfigError(ValueError):
    """Invalid run configuration."""
