"""
Utilities module

Logging helpers and the shared error hierarchy.
"""

from .logging import LoggingManager
from .errors import (
    KnapsackScoringError,
    ValidationError,
    NotIncentivizableError,
    OracleSizeLimitError,
    LPNumericalError,
    ICViolationError,
)
