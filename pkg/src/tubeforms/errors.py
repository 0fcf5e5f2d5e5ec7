"""Exception types shared across the package."""

from __future__ import annotations

import math


class DomainError(ValueError):
    """An argument lies outside the operation's mathematical domain."""


class ResolutionError(ValueError):
    """A quadrature grid is too coarse for the field's mode content."""


class ConvergenceError(RuntimeError):
    """A series hit its term cap before meeting the requested tolerance."""

    def __init__(self, message: str, partial_log_value: float = math.nan, estimate: float = math.inf):
        super().__init__(message)
        self.partial_log_value = partial_log_value
        self.estimate = estimate

    @property
    def partial_value(self) -> float:
        x = self.partial_log_value
        return math.exp(x) if x < 709.0 else math.inf
