"""
Closed-form bounds

Probability-budget caps on incentivizable sets, the effort cap and
threshold stopping level for i.i.d. tasks, and the tail inequalities
behind the truncated mechanism's headroom argument. Logs are natural
throughout.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from ..config.config_loader import DEFAULT_EVAL_TOL
from ..utils.errors import ValidationError

logger = logging.getLogger(__name__)

MAIN = 'main'
COMPANION = 'companion'

HOEFFDING = 'hoeffding'
BERNSTEIN = 'bernstein'


@dataclass(frozen=True)
class BoundReport:
    name: str
    value: float
    satisfied: Optional[bool] = None
    applicable: bool = True
    detail: str = ''

    def to_document(self):
        return {
            'name': self.name,
            # JSON has no infinity
            'value': self.value if math.isfinite(self.value) else None,
            'satisfied': self.satisfied,
            'applicable': self.applicable,
            'detail': self.detail,
        }


def pivotal_key(task) -> float:
    """(16/3)(1 - 2c/p) + p, minimized by the budget-pivotal task"""
    return 16.0 / 3.0 * (1.0 - 2.0 * task.cost / task.prob) + task.prob


def _main_prob_bound(tasks, tol):
    if not tasks:
        return BoundReport('prob_budget', math.inf, True, detail='empty set')

    applicable = all(t.prob <= 0.25 + tol and 2.0 * t.cost / t.prob >= 15.0 / 16.0 - tol for t in tasks)
    pivot = min(tasks, key=lambda t: (pivotal_key(t), t.id))
    bound = pivotal_key(pivot)
    mass = sum(t.prob for t in tasks)
    detail = f"pivotal task {pivot.id}, sum p = {mass:.6g}"
    if not applicable:
        logger.warning(f"Probability-budget bound not applicable: needs p <= 1/4 and 2c/p >= 15/16 ({detail})")
        return BoundReport('prob_budget', bound, None, applicable=False, detail=detail)
    return BoundReport('prob_budget', bound, mass <= bound + tol, detail=detail)


def _companion_prob_bound(tasks, tol):
    if not tasks:
        return BoundReport('prob_budget_companion', math.inf, True, detail='empty set')

    p = tasks[0].prob
    common = all(abs(t.prob - p) <= tol for t in tasks)
    applicable = common and p <= 0.5 + tol and all(t.cost >= p / 2.1 - tol for t in tasks)
    top_cost = max(t.cost for t in tasks)
    if p >= 1.0:
        bound = math.inf
    else:
        bound = -3.0 * math.log(p / (2.0 * top_cost)) / math.log(1.0 - p) + 1.0
    detail = f"|set| = {len(tasks)}, max cost {top_cost:.6g}"
    if not applicable:
        logger.warning(f"Companion size bound not applicable: needs common p <= 1/2 and c >= p/2.1 ({detail})")
        return BoundReport('prob_budget_companion', bound, None, applicable=False, detail=detail)
    return BoundReport('prob_budget_companion', bound, len(tasks) <= bound + tol, detail=detail)


def prob_budget_bound(tasks: Sequence, form=MAIN, tol=DEFAULT_EVAL_TOL) -> BoundReport:
    """
    Cap on how much revelation probability an incentivizable set can hold.

    ``main``: sum of p over the set is at most the smallest
    (16/3)(1 - 2c/p) + p among its members, for sets with p <= 1/4 and
    2c/p >= 15/16. ``companion``: with a common p <= 1/2 and every
    c >= p/2.1, the set size is at most -3 ln(p/2c*)/ln(1-p) + 1 where
    c* is the largest cost.
    """
    tasks = list(tasks)
    if form == MAIN:
        return _main_prob_bound(tasks, tol)
    if form == COMPANION:
        return _companion_prob_bound(tasks, tol)
    raise ValidationError(f"unknown bound form {form!r}")


def symmetric_effort_applicable(p: float, c: float) -> bool:
    if c <= 0 or p > 0.5:
        return False
    eps = p / (2.0 * c) - 1.0
    return 0.0 < eps < 1.0 / 8.0


def symmetric_effort_upper(p: float, c: float) -> float:
    """
    Most i.i.d. tasks any bounded rule can incentivize: -4 ln(1+eps)/ln(1-p)
    with eps = p/2c - 1. Infinite outside p <= 1/2, 0 < eps < 1/8.
    """
    if not symmetric_effort_applicable(p, c):
        logger.debug(f"Symmetric effort bound not applicable at p={p}, c={c}")
        return math.inf
    eps = p / (2.0 * c) - 1.0
    return -4.0 * math.log1p(eps) / math.log1p(-p)


def threshold_stop_level(p: float, c: float, n: int, tol=DEFAULT_EVAL_TOL) -> int:
    """
    Effort level a threshold-1 rule induces on n i.i.d. tasks.

    The l-th extra task gains p(1-p)^l / 2; effort continues while that
    is strictly above c.
    """
    if n < 0:
        raise ValidationError(f"n must be nonnegative, got {n}")
    level = 0
    while level < n and 0.5 * p * (1.0 - p) ** level - c > tol:
        level += 1
    return level


def tail_bounds(kind: str, delta: float, ranges: Sequence[Tuple[float, float]] = (),
                variance_sum: float = 0.0, bound: float = 0.0, two_sided=False) -> float:
    """
    Upper bound on P(X - E[X] >= delta) for a sum of independent terms.

    Args:
        kind: ``hoeffding`` (needs per-term ranges) or ``bernstein``
            (needs the summed second moments and the magnitude bound M)
        delta: Deviation, nonnegative
        two_sided: Bound P(|X - E[X]| >= delta) instead (doubles the tail)

    Returns:
        float: The bound, clipped to [0, 1]
    """
    if delta < 0:
        raise ValidationError(f"delta must be nonnegative, got {delta}")

    if kind == HOEFFDING:
        spread = sum((b - a) ** 2 for a, b in ranges)
        if spread <= 0:
            value = 1.0 if delta == 0 else 0.0
        else:
            value = math.exp(-2.0 * delta ** 2 / spread)
    elif kind == BERNSTEIN:
        if variance_sum < 0 or bound < 0:
            raise ValidationError("variance sum and magnitude bound must be nonnegative")
        denom = variance_sum + bound / 3.0
        if denom <= 0:
            value = 1.0 if delta == 0 else 0.0
        else:
            value = math.exp(-0.5 * delta ** 2 / denom)
    else:
        raise ValidationError(f"unknown tail bound {kind!r}")

    if two_sided:
        value *= 2.0
    return min(1.0, value)


def budget_headroom_bound() -> float:
    """
    Failure probability of the truncated mechanism's headroom event.

    With the recommendation set inside cost budget 3/2, the informative
    bonuses of the other tasks (second moments summing to at most
    3 (9/8)^2, each at most 9/4) overshoot the 11 - 45/8 of headroom
    below the cap with at most this probability.
    """
    return tail_bounds(BERNSTEIN, delta=11.0 - 45.0 / 8.0,
                       variance_sum=3.0 * (9.0 / 8.0) ** 2, bound=9.0 / 4.0)
