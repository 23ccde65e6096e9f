"""
Recommendation sets and the case partitions

Costs and probabilities here are those of an instance with budget 1;
the pipeline normalizes before calling in and scales the rule back.
"""

import logging
import math
from typing import Dict, FrozenSet, Iterable, Optional

from ..config.config_loader import DEFAULT_EVAL_TOL, DEFAULT_MASS_TOL
from ..scoring import INFLATED_CAP, TRUNCATED_SCALE, build_truncated_separate
from .greedy import COST, PROB, SUBMODULAR_NOTE, knapsack_greedy, submodular_greedy
from .mechanism import (
    CASE_X,
    CASE_Y1,
    CASE_Y1_SEQ,
    CASE_Y2,
    CASE_Y2_SEQ,
    CASE_Y3,
    Mechanism,
    Provenance,
)

logger = logging.getLogger(__name__)

# greedy cost budget of the truncated mechanism at cap INFLATED_CAP
TRUNCATED_COST_BUDGET = 1.5
# probability budget of the sequential threshold recommendation
SEQUENTIAL_PROB_BUDGET = 0.55

# partition boundaries on p / 2c and p
X_RATIO = 11.0
Y_RATIO = 16.0 / 15.0
Y1_PROB = 0.25
Y1_SEQ_PROB = 0.1


def _ground(inst, ground: Optional[Iterable[int]]):
    return sorted(set(inst.ids if ground is None else ground))


def recommend_truncated(inst, ground: Optional[Iterable[int]] = None,
                        budget: float = TRUNCATED_COST_BUDGET) -> FrozenSet[int]:
    """Greedy by value per cost with a budget on the summed cost"""
    ids = _ground(inst, ground)
    if inst.valuation.is_coverage:
        psi = submodular_greedy(inst, budget, COST, ids)
    else:
        psi, _ = knapsack_greedy([inst.tasks[i] for i in ids], budget, COST)
    logger.debug(f"Truncated recommendation at cost budget {budget:.6g}: {sorted(psi)}")
    return psi


def build_truncated_mechanism(inst, cap: float = INFLATED_CAP, ground: Optional[Iterable[int]] = None,
                              case: Optional[str] = None) -> Mechanism:
    """
    Truncated separate mechanism clamped to [0, cap].

    At cap 11 this is the budget-inflated construction with greedy cost
    budget 3/2. At cap 1 it is the same construction with costs and
    scores scaled by 1/11, so the greedy runs at cost budget 3/22.
    """
    norm = inst.normalized()
    budget = TRUNCATED_COST_BUDGET * cap / INFLATED_CAP
    psi = recommend_truncated(norm, ground, budget)
    rule = build_truncated_separate(norm, psi, cap=cap, scale=TRUNCATED_SCALE)

    notes = [f"greedy cost budget {budget:.6g}, cap {cap:g}"]
    if cap != INFLATED_CAP:
        notes.append(f"costs and scores scaled by {cap / INFLATED_CAP:.6g}")
    if norm.valuation.is_coverage:
        notes.append(SUBMODULAR_NOTE)
    if not psi:
        notes.append("empty recommendation: constant score")
    provenance = Provenance('truncated_greedy', case, tuple(notes))
    return Mechanism(rule, psi, provenance).scaled(inst.budget)


def threshold_key(task) -> float:
    """1 - 2c/p + p: the probability mass a threshold set led by this task can carry"""
    return 1.0 - 2.0 * task.cost / task.prob + task.prob


def threshold_condition(inst, psi: Iterable[int], tol=DEFAULT_EVAL_TOL) -> bool:
    """
    Whether the threshold rule with threshold 1 on psi makes full
    effort optimal: for every member, the chance that no other member
    is informative times p/2 covers its cost.
    """
    psi = sorted(psi)
    for i in psi:
        others = math.prod(1.0 - inst.tasks[j].prob for j in psi if j != i)
        if others * inst.tasks[i].prob / 2.0 < inst.tasks[i].cost - tol:
            return False
    return True


def _prob_greedy(inst, lead: int, candidates, budget: float) -> FrozenSet[int]:
    """Greedy by value per probability, seeded with the lead task"""
    if inst.valuation.is_coverage:
        return submodular_greedy(inst, budget, PROB, candidates, initial=(lead,))
    chosen = [lead]
    mass = inst.tasks[lead].prob
    order = sorted(candidates, key=lambda i: (-inst.tasks[i].value / inst.tasks[i].prob, i))
    for i in order:
        if mass + inst.tasks[i].prob > budget + DEFAULT_MASS_TOL:
            break
        chosen.append(i)
        mass += inst.tasks[i].prob
    return frozenset(chosen)


def recommend_threshold_static(inst, ground: Optional[Iterable[int]] = None,
                               tol=DEFAULT_EVAL_TOL) -> FrozenSet[int]:
    """
    Threshold recommendation for the static agent.

    Every ground task j leads one candidate: the tasks whose key is at
    least j's are added to {j} by value per probability while the
    total probability, j included, stays within key(j). A second
    candidate pairs j with the most valuable of those tasks when the
    pair passes the exact threshold condition, and is that task alone
    otherwise. The most valuable candidate wins, ties to the first.
    """
    ids = _ground(inst, ground)
    keys = {i: threshold_key(inst.tasks[i]) for i in ids}

    best, best_value = frozenset(), -math.inf
    for j in ids:
        above = [i for i in ids if keys[j] <= keys[i] + DEFAULT_MASS_TOL]
        greedy = _prob_greedy(inst, j, [i for i in above if i != j], keys[j])

        star = max(above, key=lambda i: (inst.value([i]), -i))
        pair = frozenset((j, star))
        alternative = pair if threshold_condition(inst, pair, tol) else frozenset((star,))

        for candidate in (greedy, alternative):
            value = inst.value(candidate)
            if value > best_value + tol:
                best, best_value = candidate, value
        logger.debug(f"Lead {j}: greedy {sorted(greedy)}, alternative {sorted(alternative)}")

    return best


def recommend_threshold_sequential(inst, ground: Optional[Iterable[int]] = None,
                                   budget: float = SEQUENTIAL_PROB_BUDGET) -> FrozenSet[int]:
    """Greedy by value per probability with a budget on the summed probability"""
    ids = _ground(inst, ground)
    if not ids:
        return frozenset()
    if inst.valuation.is_coverage:
        return submodular_greedy(inst, budget, PROB, ids)
    psi, _ = knapsack_greedy([inst.tasks[i] for i in ids], budget, PROB)
    return psi


def _incentivizable(inst, tol):
    keep = []
    for task in inst.tasks:
        if task.incentivizable(tol):
            keep.append(task)
        else:
            logger.warning(f"Task {task.id} has 2c > p and is left out of the partition")
    return keep


def partition_static(inst, tol=DEFAULT_MASS_TOL) -> Dict[str, FrozenSet[int]]:
    """
    Split tasks by p/2c and p:

    X: p/2c > 11; Y3: 16/15 < p/2c <= 11; Y1: p/2c <= 16/15 with
    p >= 1/4; Y2: p/2c <= 16/15 with p < 1/4.
    """
    norm = inst.normalized()
    cases = {CASE_X: set(), CASE_Y1: set(), CASE_Y2: set(), CASE_Y3: set()}
    for task in _incentivizable(norm, tol):
        if task.ratio > X_RATIO:
            cases[CASE_X].add(task.id)
        elif task.ratio > Y_RATIO:
            cases[CASE_Y3].add(task.id)
        elif task.prob >= Y1_PROB:
            cases[CASE_Y1].add(task.id)
        else:
            cases[CASE_Y2].add(task.id)
    return {label: frozenset(ids) for label, ids in cases.items()}


def partition_sequential(inst, tol=DEFAULT_MASS_TOL) -> Dict[str, FrozenSet[int]]:
    """X: p/2c > 11; otherwise Y1seq when p >= 0.1 and Y2seq below"""
    norm = inst.normalized()
    cases = {CASE_X: set(), CASE_Y1_SEQ: set(), CASE_Y2_SEQ: set()}
    for task in _incentivizable(norm, tol):
        if task.ratio > X_RATIO:
            cases[CASE_X].add(task.id)
        elif task.prob >= Y1_SEQ_PROB:
            cases[CASE_Y1_SEQ].add(task.id)
        else:
            cases[CASE_Y2_SEQ].add(task.id)
    return {label: frozenset(ids) for label, ids in cases.items()}
