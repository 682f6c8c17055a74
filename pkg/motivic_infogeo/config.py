#!/usr/bin/env python3
"""
Configuration for motivic-infogeo

Values come from the process environment, optionally seeded from a .env
file. Explicit function arguments always take precedence.
"""

import os
from dotenv import load_dotenv

from .errors import BudgetExceededError, ConfigurationError

# Load environment variables
load_dotenv()

DEFAULT_ENUM_BUDGET = 10**8
DEFAULT_TRUNCATION = int(os.getenv("MOTIVIC_TRUNCATION", "8"))
DEFAULT_SEED = int(os.getenv("MOTIVIC_SEED", "20240601"))
LOG_LEVEL = os.getenv("MOTIVIC_LOG_LEVEL", "INFO")

# Largest field order for which log/antilog tables are built
MAX_FIELD_ORDER = 2**22


def get_enumeration_budget() -> int:
    """
    Enumeration budget, read at call time

    Returns:
        MOTIVIC_ENUM_BUDGET if set, otherwise 10**8
    """
    raw = os.getenv("MOTIVIC_ENUM_BUDGET")
    if raw is None or not raw.strip():
        return DEFAULT_ENUM_BUDGET
    try:
        value = int(float(raw))
    except ValueError:
        raise ConfigurationError(
            f"MOTIVIC_ENUM_BUDGET must be an integer, got {raw!r}"
        )
    if value <= 0:
        raise ConfigurationError(f"MOTIVIC_ENUM_BUDGET must be positive, got {value}")
    return value


def check_budget(what: str, size: int) -> None:
    """Raise BudgetExceededError when size is above the enumeration budget"""
    budget = get_enumeration_budget()
    if size > budget:
        raise BudgetExceededError(what, size, budget)
