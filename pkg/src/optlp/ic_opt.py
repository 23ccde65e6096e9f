"""
Exact optimal mechanism for small instances

For a candidate recommendation set the question "is there a bounded
scoring rule making it incentive compatible" is a linear feasibility
problem. Two exact reductions keep it small:

* a rule can ignore tasks outside the set (replacing their reports by ⊥
  keeps every constraint), and
* flipping 0 and 1 on any task maps IC rules to IC rules under the
  uniform prior, so averaging over flips gives an IC rule that only
  sees, per task, whether the report is ⊥, matches the state, or
  mismatches it.

With k recommended tasks that leaves 3^k score variables. Reporting
deviations are covered through epigraph variables u(I) >= expected
score of every report available to an agent whose informative set is
I, which encodes every joint reporting map at once.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..agent import subsets_in_order
from ..config.config_loader import DEFAULT_IC_OPT_LIMIT, DEFAULT_LP_TOL
from ..model import Trit, iter_outcomes, iter_signal_profiles, outcome_index, signal_index
from ..scoring import TabularRule, rule_to_document
from ..utils import LoggingManager
from ..utils.errors import OracleSizeLimitError, ValidationError
from .lp import GE, LinearProgram
from .simplex import simplex_solve

logger = logging.getLogger(__name__)

# per-task report classes
C_BOT, C_MATCH, C_MISMATCH = 0, 1, 2
# what an agent can do on one task: the three classes, or guess blind
A_COIN = 3


@dataclass(frozen=True)
class ICOptimum:
    value: float
    recommendation: FrozenSet[int]
    rule: TabularRule

    def to_document(self, id_map=None):
        psi = sorted(self.recommendation)
        if id_map is not None:
            psi = sorted(id_map[i] for i in psi)
        return {'value': self.value, 'recommendation': psi, 'rule': rule_to_document(self.rule)}


def _class_index(classes: Sequence[int]) -> int:
    index = 0
    for c in classes:
        index = index * 3 + c
    return index


def _action_coefficients(actions: Sequence[int], k: int) -> np.ndarray:
    """Expected-score coefficients over class variables for one joint action"""
    coeffs = np.zeros(3 ** k)
    options = [(C_MATCH, C_MISMATCH) if a == A_COIN else (a,) for a in actions]
    weight = 0.5 ** sum(1 for a in actions if a == A_COIN)
    for classes in itertools.product(*options):
        coeffs[_class_index(classes)] += weight
    return coeffs


def _available_actions(informative: FrozenSet[int], k: int):
    """Every report an agent with these informative positions can make"""
    per_task = [(C_BOT, C_MATCH, C_MISMATCH) if j in informative else (C_BOT, A_COIN) for j in range(k)]
    return itertools.product(*per_task)


def _branch_prob(probs: Sequence[float], effort: FrozenSet[int], informative: FrozenSet[int]) -> float:
    prob = 1.0
    for j in effort:
        prob *= probs[j] if j in informative else 1.0 - probs[j]
    return prob


class _FeasibilityModel:
    """The class-rule LP for one recommendation set (positions 0..k-1)"""

    def __init__(self, probs: Sequence[float], costs: Sequence[float]):
        self.k = len(probs)
        self.probs = list(probs)
        self.costs = list(costs)
        self.n_scores = 3 ** self.k
        positions = range(self.k)
        self.subsets = list(subsets_in_order(positions))
        self.u_index = {subset: self.n_scores + pos for pos, subset in enumerate(self.subsets)}

    def truthful(self, informative) -> np.ndarray:
        classes = [C_MATCH if j in informative else C_BOT for j in range(self.k)]
        coeffs = np.zeros(self.n_scores)
        coeffs[_class_index(classes)] = 1.0
        return coeffs

    def build(self) -> LinearProgram:
        lp = LinearProgram(self.n_scores + len(self.subsets))
        for j in range(self.n_scores):
            lp.set_bounds(j, 0.0, 1.0)

        full = frozenset(range(self.k))
        truth_value = np.zeros(lp.n_vars)
        for informative in self.subsets:
            prob = _branch_prob(self.probs, full, informative)
            truth = self.truthful(informative)
            truth_value[:self.n_scores] += prob * truth

            for actions in _available_actions(informative, self.k):
                coeffs = _action_coefficients(actions, self.k)
                # u(I) >= E[score | action]
                row = np.zeros(lp.n_vars)
                row[self.u_index[informative]] = 1.0
                row[:self.n_scores] -= coeffs
                lp.add_constraint(row, GE, 0.0)
                # truthful reporting is optimal on path
                if prob > 0.0 and not np.array_equal(coeffs, truth):
                    row = np.zeros(lp.n_vars)
                    row[:self.n_scores] = truth - coeffs
                    lp.add_constraint(row, GE, 0.0)

        full_cost = sum(self.costs)
        for effort in self.subsets:
            row = truth_value.copy()
            for informative in subsets_in_order(sorted(effort)):
                row[self.u_index[informative]] -= _branch_prob(self.probs, effort, informative)
            lp.add_constraint(row, GE, full_cost - sum(self.costs[j] for j in effort))
        return lp


def _expand_witness(n: int, psi: Sequence[int], class_scores: np.ndarray, cap: float) -> TabularRule:
    table = np.zeros((3 ** n, 2 ** n))
    for sigma in iter_signal_profiles(n):
        row = signal_index(sigma)
        for omega in iter_outcomes(n):
            classes = []
            for i in psi:
                if sigma[i] is Trit.BOT:
                    classes.append(C_BOT)
                else:
                    classes.append(C_MATCH if sigma[i].to_bit() == omega[i] else C_MISMATCH)
            table[row, outcome_index(omega)] = class_scores[_class_index(classes)]
    return TabularRule(n, np.clip(table, 0.0, 1.0) * cap, cap=cap)


def ic_feasible(inst, psi: Iterable[int], tol=DEFAULT_LP_TOL) -> Tuple[bool, Optional[TabularRule]]:
    """
    Whether some scoring rule with scores in [0, budget] makes psi
    incentive compatible, and a witness rule when it does.
    """
    psi = sorted(set(psi))
    for i in psi:
        if i < 0 or i >= inst.n:
            raise ValidationError(f"unknown task id {i}")
    if not psi:
        return True, TabularRule.zeros(inst.n, cap=inst.budget)

    norm = inst.normalized()
    model = _FeasibilityModel(norm.probs(psi), [norm.tasks[i].cost for i in psi])
    result = simplex_solve(model.build(), tol=tol)
    if not result.optimal:
        logger.debug(f"Set {psi} is not incentivizable ({result.status.value})")
        return False, None
    return True, _expand_witness(inst.n, psi, result.x[:model.n_scores], inst.budget)


def _candidate_order(inst) -> List[FrozenSet[int]]:
    candidates = list(subsets_in_order(inst.ids))
    return sorted(candidates, key=lambda s: (-inst.value(s), len(s), sorted(s)))


@LoggingManager.log_execution_time
def ic_opt_exact(inst, limit=DEFAULT_IC_OPT_LIMIT, tol=DEFAULT_LP_TOL) -> ICOptimum:
    """
    IC-OPT: the most valuable recommendation set some bounded rule can
    make incentive compatible.

    Candidates are scanned by decreasing value, then size, then
    lexicographically, so the first feasible one is optimal.
    """
    if inst.n > limit:
        raise OracleSizeLimitError('ic_opt_exact', inst.n, limit)

    for psi in _candidate_order(inst):
        feasible, rule = ic_feasible(inst, psi, tol)
        if feasible:
            value = inst.value(psi)
            logger.debug(f"IC-OPT = {value:.6g} at {sorted(psi)}")
            return ICOptimum(value, psi, rule)

    # the empty set is always feasible
    raise AssertionError("no feasible recommendation set")
