"""
Optimal effort for i.i.d. tasks

With n identical tasks an optimal rule only needs to look at the
number k of informative reports: it pays s_k. Whether effort level l
can be incentivized is then a small LP over s_0..s_n.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ..config.config_loader import DEFAULT_LP_TOL
from ..scoring import poisson_binomial_pmf
from ..utils.errors import ValidationError
from .lp import GE, LinearProgram
from .simplex import simplex_solve

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SymmetricRule:
    """Score s_k for k informative reports, k = 0..n"""
    scores: Tuple[float, ...]

    @property
    def n(self):
        return len(self.scores) - 1

    def expected_score(self, level: int, p: float) -> float:
        pmf = poisson_binomial_pmf([p] * level)
        return float(pmf @ np.asarray(self.scores[:level + 1]))

    def utility(self, level: int, p: float, c: float) -> float:
        return self.expected_score(level, p) - level * c


def _binomial_row(n_vars: int, level: int, p: float) -> np.ndarray:
    row = np.zeros(n_vars)
    row[:level + 1] = poisson_binomial_pmf([p] * level)
    return row


def symmetric_feasible(n: int, p: float, c: float, target_l: int,
                       tol=DEFAULT_LP_TOL) -> Tuple[bool, Optional[SymmetricRule]]:
    """
    Whether some count-based rule makes effort on exactly target_l of
    the n tasks optimal.

    Scores lie in [0, 1], increase with k, and never more than double
    per extra informative report (the agent could guess instead).
    """
    if not 0 <= target_l <= n:
        raise ValidationError(f"target level {target_l} outside 0..{n}")
    if not 0.0 < p <= 1.0 or c < 0:
        raise ValidationError(f"need 0 < p <= 1 and c >= 0, got p={p}, c={c}")

    lp = LinearProgram(n + 1)
    for k in range(n + 1):
        lp.set_bounds(k, 0.0, 1.0)
    for k in range(n):
        lp.add_constraint({k + 1: 1.0, k: -1.0}, GE, 0.0)
        lp.add_constraint({k: 1.0, k + 1: -0.5}, GE, 0.0)

    target = _binomial_row(n + 1, target_l, p)
    for level in range(n + 1):
        if level == target_l:
            continue
        row = target - _binomial_row(n + 1, level, p)
        lp.add_constraint(row, GE, (target_l - level) * c)

    result = simplex_solve(lp, tol=tol)
    if not result.optimal:
        return False, None
    return True, SymmetricRule(tuple(float(s) for s in np.clip(result.x, 0.0, 1.0)))


def symmetric_max_effort(n: int, p: float, c: float, tol=DEFAULT_LP_TOL) -> int:
    """Largest incentivizable effort level, scanning down from n"""
    for level in range(n, 0, -1):
        feasible, _ = symmetric_feasible(n, p, c, level, tol)
        if feasible:
            logger.debug(f"Symmetric max effort for n={n}, p={p}, c={c}: {level}")
            return level
    return 0
