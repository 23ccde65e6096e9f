"""
Linear program description and results.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from ..config.config_loader import DEFAULT_LP_TOL
from ..utils.errors import ValidationError

LE = '<='
GE = '>='
EQ = '='
SENSES = (LE, GE, EQ)

Coefficients = Union[Mapping[int, float], Sequence[float]]


class LPStatus(Enum):
    OPTIMAL = 'optimal'
    INFEASIBLE = 'infeasible'
    UNBOUNDED = 'unbounded'


@dataclass(frozen=True)
class LPResult:
    status: LPStatus
    objective: Optional[float] = None
    x: Optional[np.ndarray] = None
    iterations: int = 0

    @property
    def optimal(self):
        return self.status is LPStatus.OPTIMAL


@dataclass
class LinearProgram:
    """
    maximize (or minimize) c.x subject to rows a.x {<=, =, >=} b and
    lower <= x <= upper. Lower bounds default to 0 and upper bounds to
    +inf; a lower bound of -inf makes the variable free.
    """
    n_vars: int
    maximize: bool = True
    objective: np.ndarray = None
    rows: List[Tuple[np.ndarray, str, float]] = field(default_factory=list)
    lower: np.ndarray = None
    upper: np.ndarray = None

    def __post_init__(self):
        if self.n_vars < 0:
            raise ValidationError(f"n_vars must be nonnegative, got {self.n_vars}")
        if self.objective is None:
            self.objective = np.zeros(self.n_vars)
        if self.lower is None:
            self.lower = np.zeros(self.n_vars)
        if self.upper is None:
            self.upper = np.full(self.n_vars, math.inf)
        self.objective = np.asarray(self.objective, dtype=float)
        self.lower = np.asarray(self.lower, dtype=float)
        self.upper = np.asarray(self.upper, dtype=float)
        if self.objective.shape != (self.n_vars,):
            raise ValidationError(f"objective has shape {self.objective.shape}, expected ({self.n_vars},)")

    def _dense(self, coeffs: Coefficients) -> np.ndarray:
        if isinstance(coeffs, Mapping):
            row = np.zeros(self.n_vars)
            for j, a in coeffs.items():
                if not 0 <= j < self.n_vars:
                    raise ValidationError(f"variable index {j} out of range")
                row[j] += a
            return row
        row = np.asarray(coeffs, dtype=float)
        if row.shape != (self.n_vars,):
            raise ValidationError(f"constraint row has shape {row.shape}, expected ({self.n_vars},)")
        return row

    def set_objective(self, coeffs: Coefficients, maximize=True):
        self.objective = self._dense(coeffs)
        self.maximize = maximize
        return self

    def add_constraint(self, coeffs: Coefficients, sense: str, rhs: float):
        if sense not in SENSES:
            raise ValidationError(f"constraint sense must be one of {SENSES}, got {sense!r}")
        if not math.isfinite(rhs):
            raise ValidationError(f"constraint right-hand side must be finite, got {rhs}")
        self.rows.append((self._dense(coeffs), sense, float(rhs)))
        return self

    def set_bounds(self, var: int, lower: float = 0.0, upper: float = math.inf):
        if lower > upper:
            raise ValidationError(f"variable {var}: lower bound {lower} above upper bound {upper}")
        self.lower[var] = lower
        self.upper[var] = upper
        return self

    @property
    def n_rows(self):
        return len(self.rows)

    def violation(self, x: np.ndarray) -> float:
        """Largest violation of any constraint or bound at x"""
        x = np.asarray(x, dtype=float)
        worst = 0.0
        if self.n_vars:
            worst = max(worst, float(np.max(self.lower - x)), float(np.max(x - self.upper)))
        for a, sense, b in self.rows:
            lhs = float(a @ x)
            if sense == LE:
                worst = max(worst, lhs - b)
            elif sense == GE:
                worst = max(worst, b - lhs)
            else:
                worst = max(worst, abs(lhs - b))
        return worst

    def check(self, x: np.ndarray, tol=DEFAULT_LP_TOL) -> bool:
        return self.violation(x) <= tol

    def value(self, x: np.ndarray) -> float:
        return float(self.objective @ np.asarray(x, dtype=float))
