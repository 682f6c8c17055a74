#!/usr/bin/env python3
"""
Exception hierarchy for motivic-infogeo

Library functions raise these; the workbench and the CLI turn them into
result documents and exit codes.
"""


class MotivicError(Exception):
    """Base class for every error raised by the package"""

    exit_code = 4


class ValidationError(MotivicError, ValueError):
    """Invalid input, violated precondition or mismatched contexts"""

    exit_code = 2


class ConfigurationError(ValidationError):
    """Unusable configuration value (environment or .env file)"""


class BadReductionError(ValidationError):
    """Equations degenerate when reduced modulo a prime"""


class BudgetExceededError(MotivicError):
    """Enumeration larger than the configured budget"""

    exit_code = 3

    def __init__(self, what: str, size: int, budget: int):
        self.what = what
        self.size = size
        self.budget = budget
        super().__init__(
            f"{what}: {size} items exceeds the enumeration budget {budget}. "
            "Lower the parameters or raise MOTIVIC_ENUM_BUDGET."
        )


class DivergenceError(MotivicError):
    """Series evaluated outside the convergence policy, or vanishing normalizer"""


class PoleError(MotivicError):
    """Gamma factor evaluated too close to a pole"""


class SingularMetricError(MotivicError):
    """Metric with determinant below 1e-12"""


class ConventionError(MotivicError):
    """Two independent evaluations of the same quantity disagree"""
