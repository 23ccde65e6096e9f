"""
Knapsack optimum without incentive constraints

Exact branch and bound over the task set. The bound at every node is
the fractional knapsack over the marginal gains of the remaining tasks,
which over-estimates any completion for additive and for coverage
(submodular) valuations alike.
"""

import logging
import math
from typing import FrozenSet, Iterable, Optional, Sequence, Tuple

from ..config.config_loader import DEFAULT_ALG_OPT_LIMIT, DEFAULT_EVAL_TOL, DEFAULT_MASS_TOL
from ..model import marginal_value
from ..utils.errors import OracleSizeLimitError, ValidationError

logger = logging.getLogger(__name__)


def fractional_knapsack(items: Iterable[Tuple[float, float]], budget: float) -> float:
    """
    Optimum of the LP relaxation for (gain, weight) items.

    Weightless items with positive gain are always taken in full.
    """
    if budget < 0:
        return 0.0

    total = 0.0
    weighted = []
    for gain, weight in items:
        if gain <= 0:
            continue
        if weight <= 0:
            total += gain
        else:
            weighted.append((gain / weight, gain, weight))

    room = budget
    for _, gain, weight in sorted(weighted, key=lambda g: -g[0]):
        if room <= 0:
            break
        take = min(1.0, room / weight)
        total += take * gain
        room -= take * weight
    return total


def _order_by_density(inst, ids: Sequence[int]):
    def density(i):
        cost = inst.tasks[i].cost
        value = inst.value([i])
        return math.inf if cost == 0 else value / cost

    return sorted(ids, key=lambda i: (-density(i), i))


def alg_opt_set(inst, budget: Optional[float] = None, limit=DEFAULT_ALG_OPT_LIMIT,
                tol=DEFAULT_EVAL_TOL, ids: Optional[Iterable[int]] = None) -> Tuple[float, FrozenSet[int]]:
    """
    Maximum value subject to total cost within the budget.

    Args:
        inst: The instance
        budget: Cost budget, the instance budget when omitted
        limit: Largest task count the exact search accepts
        ids: Restrict the search to these tasks

    Returns:
        tuple: (value, maximizing task set)
    """
    budget = inst.budget if budget is None else budget
    if budget < 0:
        raise ValidationError(f"budget must be nonnegative, got {budget}")
    ids = list(inst.ids if ids is None else ids)
    if len(ids) > limit:
        raise OracleSizeLimitError('alg_opt', len(ids), limit)

    order = _order_by_density(inst, ids)
    costs = {i: inst.tasks[i].cost for i in order}
    best = [0.0, frozenset()]

    def search(pos, chosen, value, spent):
        if value > best[0] + tol:
            best[0], best[1] = value, frozenset(chosen)
        if pos == len(order):
            return

        room = budget - spent
        rest = [(marginal_value(inst, chosen, i), costs[i]) for i in order[pos:] if costs[i] <= room + DEFAULT_MASS_TOL]
        if value + fractional_knapsack(rest, room + DEFAULT_MASS_TOL) <= best[0] + tol:
            return

        task = order[pos]
        if costs[task] <= room + DEFAULT_MASS_TOL:
            chosen.append(task)
            search(pos + 1, chosen, inst.value(chosen), spent + costs[task])
            chosen.pop()
        search(pos + 1, chosen, value, spent)

    search(0, [], 0.0, 0.0)
    logger.debug(f"ALG-OPT at budget {budget:.6g}: value {best[0]:.6g} with {sorted(best[1])}")
    return best[0], best[1]


def alg_opt(inst, budget: Optional[float] = None, limit=DEFAULT_ALG_OPT_LIMIT) -> float:
    """Value of the best budget-feasible set, ignoring incentives"""
    return alg_opt_set(inst, budget, limit)[0]
