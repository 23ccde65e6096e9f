"""
Greedy knapsack solvers

Both greedies walk tasks by value per unit of weight, where the weight
is either the cost or the revelation probability, and stop at the first
task that does not fit. The coverage greedy recomputes marginal values
each round and is compared against the best feasible singleton.

The coverage variant is the plain cost-benefit greedy with the
singleton fallback. It is a constant-factor approximation, but a
weaker one than 1 - 1/e, which needs partial enumeration.
"""

import logging
import math
from typing import FrozenSet, Iterable, Optional, Sequence, Tuple

from ..bounds import fractional_knapsack
from ..config.config_loader import DEFAULT_EVAL_TOL, DEFAULT_MASS_TOL
from ..model import marginal_value
from ..utils.errors import ValidationError

logger = logging.getLogger(__name__)

COST = 'cost'
PROB = 'prob'
WEIGHTS = (COST, PROB)

SUBMODULAR_NOTE = "coverage greedy with best-singleton fallback (weaker constant than 1-1/e)"


def _weight_of(task, weight: str) -> float:
    if weight not in WEIGHTS:
        raise ValidationError(f"weight must be one of {WEIGHTS}, got {weight!r}")
    return task.cost if weight == COST else task.prob


def _density(gain: float, weight: float) -> float:
    if weight <= 0:
        return math.inf if gain > 0 else 0.0
    return gain / weight


def knapsack_greedy(tasks: Iterable, budget: float, weight: str = COST) -> Tuple[FrozenSet[int], float]:
    """
    Greedy by value/weight for additive values.

    Args:
        tasks: Task objects to choose from
        budget: Capacity on the summed weight
        weight: 'cost' or 'prob'

    Returns:
        tuple: (chosen ids, fractional knapsack optimum at the same budget)
    """
    if budget < 0:
        raise ValidationError(f"budget must be nonnegative, got {budget}")
    tasks = list(tasks)
    order = sorted(tasks, key=lambda t: (-_density(t.value, _weight_of(t, weight)), t.id))

    chosen = []
    used = 0.0
    for task in order:
        w = _weight_of(task, weight)
        if used + w > budget + DEFAULT_MASS_TOL:
            break
        chosen.append(task.id)
        used += w

    bound = fractional_knapsack([(t.value, _weight_of(t, weight)) for t in tasks], budget)
    logger.debug(f"Greedy on {weight} with budget {budget:.6g}: {chosen} (fractional bound {bound:.6g})")
    return frozenset(chosen), bound


def submodular_greedy(inst, budget: float, weight: str = COST, ground: Optional[Iterable[int]] = None,
                      initial: Sequence[int] = (), tol=DEFAULT_EVAL_TOL) -> FrozenSet[int]:
    """
    Cost-benefit greedy for coverage values.

    Starts from ``initial`` (whose weight counts against the budget) and
    adds the task with the largest marginal value per unit of weight
    until that task no longer fits or adds nothing. Without an initial
    set the result is the better of the greedy set and the best
    feasible singleton.
    """
    if not inst.valuation.is_coverage:
        raise ValidationError("additive handled by knapsack_greedy")
    if budget < 0:
        raise ValidationError(f"budget must be nonnegative, got {budget}")

    chosen = list(dict.fromkeys(initial))
    used = sum(_weight_of(inst.tasks[i], weight) for i in chosen)
    remaining = sorted(set(inst.ids if ground is None else ground) - set(chosen))

    while remaining:
        best, best_density, best_gain = None, -1.0, 0.0
        for i in remaining:
            gain = marginal_value(inst, chosen, i)
            density = _density(gain, _weight_of(inst.tasks[i], weight))
            if density > best_density:
                best, best_density, best_gain = i, density, gain
        if best_gain <= tol:
            break
        if used + _weight_of(inst.tasks[best], weight) > budget + DEFAULT_MASS_TOL:
            break
        chosen.append(best)
        used += _weight_of(inst.tasks[best], weight)
        remaining.remove(best)

    result = frozenset(chosen)
    if not initial:
        fitting = [i for i in (inst.ids if ground is None else sorted(ground))
                   if _weight_of(inst.tasks[i], weight) <= budget + DEFAULT_MASS_TOL]
        if fitting:
            single = max(fitting, key=lambda i: (inst.value([i]), -i))
            if inst.value([single]) > inst.value(result) + tol:
                logger.debug(f"Best singleton {single} beats the greedy set {sorted(result)}")
                result = frozenset((single,))

    logger.debug(f"Coverage greedy on {weight} with budget {budget:.6g}: {sorted(result)}")
    return result
