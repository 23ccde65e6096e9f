"""
Error types shared across the toolkit.

The CLI maps these to exit codes: ValidationError -> 2,
OracleSizeLimitError -> 3, anything else -> 1.
"""


class KnapsackScoringError(Exception):
    """Base class for all toolkit errors"""


class ValidationError(KnapsackScoringError, ValueError):
    """Input document or invariant violation"""


class NotIncentivizableError(ValidationError):
    """A single task whose budget-minimal rule exceeds the budget"""

    def __init__(self, task_id, ratio):
        self.task_id = task_id
        self.ratio = ratio
        super().__init__(f"task {task_id} is not incentivizable: 2c/p = {ratio:.6g} > 1")


class OracleSizeLimitError(KnapsackScoringError):
    """An exact oracle was asked to enumerate beyond its size limit"""

    def __init__(self, what, size, limit):
        self.what = what
        self.size = size
        self.limit = limit
        super().__init__(f"{what}: size {size} exceeds oracle limit {limit}")


class LPNumericalError(KnapsackScoringError):
    """The simplex core lost numerical accuracy or hit its iteration cap"""


class ICViolationError(KnapsackScoringError):
    """An emitted mechanism failed its incentive-compatibility check"""
