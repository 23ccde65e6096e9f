"""
Sequential effort simulation

The agent works through the recommendation set one task at a time,
seeing after each task whether its signal was informative, and stops
as soon as no remaining task has a positive one-step marginal utility.
The state that drives every decision is a summary of the informative
signals so far (count for threshold rules, accumulated bonus for
truncated rules), so the exact distribution is a layered walk over
(completed set, summary) states.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Tuple

import numpy as np
from tqdm import tqdm

from ..config.config_loader import (
    DEFAULT_EVAL_TOL,
    DEFAULT_MC_PATHS,
    DEFAULT_SEED,
    DEFAULT_SEQUENTIAL_LIMIT,
)
from ..scoring import SingleTaskRule, ThresholdRule, TruncatedSeparateRule
from ..utils.errors import OracleSizeLimitError, ValidationError

logger = logging.getLogger(__name__)

EAGER_MARGINAL = 'eager_marginal'
FIXED_ORDER_GREEDY = 'fixed_order_greedy'

# completion guarantees per construction case
SEQUENTIAL_GUARANTEES = {
    'X': 8.0 / 9.0,
    'Y2seq': 0.45,
    'Y1seq': 1.0,
}

KEY_DIGITS = 12


@dataclass(frozen=True)
class SequentialStrategy:
    kind: str = EAGER_MARGINAL
    order: Tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind not in (EAGER_MARGINAL, FIXED_ORDER_GREEDY):
            raise ValidationError(f"unknown sequential strategy {self.kind!r}")

    @classmethod
    def eager(cls):
        return cls(EAGER_MARGINAL)

    @classmethod
    def fixed_order(cls, order):
        return cls(FIXED_ORDER_GREEDY, tuple(order))


@dataclass(frozen=True)
class TraceStep:
    """One decision: what was done so far, what was seen, what comes next (None = stop)"""
    completed: FrozenSet[int]
    informative: FrozenSet[int]
    action: Optional[int]
    probability: float = 1.0


@dataclass(frozen=True)
class SequentialResult:
    completion_distribution: Dict[FrozenSet[int], float]
    expected_value: float
    completion_prob_all: float
    expected_tasks: float = 0.0
    trace: Tuple[TraceStep, ...] = field(default_factory=tuple)

    def to_document(self, id_map=None):
        def ids(s):
            return sorted(id_map[i] for i in s) if id_map is not None else sorted(s)

        return {
            'completion_prob_all': self.completion_prob_all,
            'expected_value': self.expected_value,
            'expected_tasks': self.expected_tasks,
            'completion_distribution': [
                {'completed': ids(s), 'probability': p}
                for s, p in sorted(self.completion_distribution.items(), key=lambda kv: (len(kv[0]), sorted(kv[0])))
            ],
        }


@dataclass(frozen=True)
class MonteCarloEstimate:
    mean: float
    stderr: float
    paths: int
    completion_rate: float


@dataclass(frozen=True)
class SequentialCheck:
    holds: bool
    guarantee: float
    completion_prob_all: float
    expected_value: float
    not_dominated: bool


class SequentialSimulator:
    """Exact and Monte-Carlo evaluation of one strategy against one mechanism"""

    def __init__(self, inst, rule, recommendation, strategy=None, tol=DEFAULT_EVAL_TOL,
                 limit=DEFAULT_SEQUENTIAL_LIMIT):
        self.inst = inst
        self.rule = rule
        self.recommendation = frozenset(recommendation)
        self.strategy = strategy or SequentialStrategy.eager()
        self.tol = tol

        if not isinstance(self.rule, (ThresholdRule, TruncatedSeparateRule, SingleTaskRule)):
            raise ValidationError(f"sequential simulation needs a structured rule, got {self.rule.kind}")
        if len(self.recommendation) > limit:
            raise OracleSizeLimitError('sequential_simulate', len(self.recommendation), limit)

        self._order = self._strategy_order()
        if isinstance(self.rule, TruncatedSeparateRule):
            self._bonus = {r.task: r.score_correct - r.score_bot for r in self.rule.per_task}
            self._constant = self.rule.base_score()

    @classmethod
    def for_mechanism(cls, inst, mech, strategy=None, tol=DEFAULT_EVAL_TOL, limit=DEFAULT_SEQUENTIAL_LIMIT):
        return cls(inst, mech.rule, mech.recommendation, strategy, tol, limit)

    def _strategy_order(self):
        if self.strategy.kind == EAGER_MARGINAL:
            return sorted(self.recommendation)
        listed = [i for i in self.strategy.order if i in self.recommendation]
        return listed + sorted(self.recommendation - set(listed))

    # -- state summaries --------------------------------------------------

    def initial_key(self):
        if isinstance(self.rule, ThresholdRule):
            return 0
        if isinstance(self.rule, TruncatedSeparateRule):
            return 0.0
        return False

    def advance(self, key, task, informative):
        if not informative:
            return key
        if isinstance(self.rule, ThresholdRule):
            if task in self.rule.recommendation:
                return min(key + 1, self.rule.threshold)
            return key
        if isinstance(self.rule, TruncatedSeparateRule):
            return round(key + self._bonus.get(task, 0.0), KEY_DIGITS)
        return key or task == self.rule.task

    def key_from_informative(self, informative):
        key = self.initial_key()
        for task in sorted(informative):
            key = self.advance(key, task, True)
        return key

    def terminal_score(self, key) -> float:
        """Score if the agent stops now and reports its signals as seen"""
        if isinstance(self.rule, ThresholdRule):
            return self.rule.score_for_count(key)
        if isinstance(self.rule, TruncatedSeparateRule):
            return self.rule.clamp(self._constant + key)
        return self.rule.score_correct if key else self.rule.score_bot

    def marginal(self, key, task) -> float:
        t = self.inst.tasks[task]
        gain = self.terminal_score(self.advance(key, task, True)) - self.terminal_score(key)
        return t.prob * gain - t.cost

    def decide(self, completed, key) -> Optional[int]:
        remaining = [i for i in self._order if i not in completed]
        if self.strategy.kind == FIXED_ORDER_GREEDY:
            for task in remaining:
                if self.marginal(key, task) > self.tol:
                    return task
            return None

        best, best_gain = None, self.tol
        for task in remaining:
            gain = self.marginal(key, task)
            if gain > best_gain:
                best, best_gain = task, gain
        return best

    # -- evaluation -------------------------------------------------------

    def run(self) -> SequentialResult:
        frontier = {(frozenset(), self.initial_key()): [1.0, frozenset()]}
        distribution = defaultdict(float)
        trace: List[TraceStep] = []

        while frontier:
            nxt = {}
            for (completed, key), (prob, informative) in frontier.items():
                action = self.decide(completed, key)
                trace.append(TraceStep(completed, informative, action, prob))
                if action is None:
                    distribution[completed] += prob
                    continue
                p = self.inst.tasks[action].prob
                for revealed, q in ((True, p), (False, 1.0 - p)):
                    if q <= 0.0:
                        continue
                    state = (completed | {action}, self.advance(key, action, revealed))
                    seen = informative | {action} if revealed else informative
                    if state in nxt:
                        nxt[state][0] += prob * q
                    else:
                        nxt[state] = [prob * q, seen]
            frontier = nxt

        expected_value = sum(q * self.inst.value(s) for s, q in distribution.items())
        expected_tasks = sum(q * len(s) for s, q in distribution.items())
        completion_all = distribution.get(self.recommendation, 0.0)
        total = sum(distribution.values())
        if abs(total - 1.0) > 1e-9:
            logger.warning(f"Sequential distribution sums to {total:.12g}")

        return SequentialResult(
            completion_distribution=dict(distribution),
            expected_value=float(expected_value),
            completion_prob_all=float(completion_all),
            expected_tasks=float(expected_tasks),
            trace=tuple(trace),
        )

    def monte_carlo(self, paths=DEFAULT_MC_PATHS, seed=DEFAULT_SEED, progress=False) -> MonteCarloEstimate:
        """Seeded simulation of ``paths`` independent runs"""
        rng = np.random.default_rng(seed)
        states = [(frozenset(), self.initial_key())]
        index = {states[0]: 0}
        decisions = {}

        def state_id(state):
            if state not in index:
                index[state] = len(states)
                states.append(state)
            return index[state]

        current = np.zeros(paths, dtype=np.int64)
        active = np.ones(paths, dtype=bool)
        steps = tqdm(range(len(self.recommendation) + 1), desc='sequential MC', disable=not progress)
        for _ in steps:
            if not active.any():
                break
            snapshot = current.copy()
            for sid in np.unique(snapshot[active]):
                mask = active & (snapshot == sid)
                completed, key = states[sid]
                if sid not in decisions:
                    decisions[sid] = self.decide(completed, key)
                action = decisions[sid]
                if action is None:
                    active[mask] = False
                    continue
                revealed = rng.random(int(mask.sum())) < self.inst.tasks[action].prob
                up = state_id((completed | {action}, self.advance(key, action, True)))
                down = state_id((completed | {action}, self.advance(key, action, False)))
                current[mask] = np.where(revealed, up, down)

        values_by_state = np.array([self.inst.value(s[0]) for s in states])
        values = values_by_state[current]
        complete = np.array([s[0] == self.recommendation for s in states])[current]
        stderr = float(values.std(ddof=1) / np.sqrt(paths)) if paths > 1 else 0.0
        return MonteCarloEstimate(float(values.mean()), stderr, paths, float(complete.mean()))


def sequential_simulate(inst, mech, strat=None, tol=DEFAULT_EVAL_TOL,
                        limit=DEFAULT_SEQUENTIAL_LIMIT) -> SequentialResult:
    """Exact outcome distribution of a sequential strategy"""
    result = SequentialSimulator.for_mechanism(inst, mech, strat, tol, limit).run()
    logger.debug(f"Sequential run: P(all)={result.completion_prob_all:.6g}, E[v]={result.expected_value:.6g}")
    return result


def sequential_monte_carlo(inst, mech, strat=None, paths=DEFAULT_MC_PATHS, seed=DEFAULT_SEED,
                           tol=DEFAULT_EVAL_TOL, progress=False) -> MonteCarloEstimate:
    return SequentialSimulator.for_mechanism(inst, mech, strat, tol).monte_carlo(paths, seed, progress)


def one_step_marginal(inst, rule, completed, informative, task, tol=DEFAULT_EVAL_TOL) -> float:
    """Expected utility gain of doing exactly one more task, then stopping"""
    if task in set(completed):
        return 0.0

    sim = SequentialSimulator(inst, rule, frozenset(completed) | {task}, tol=tol, limit=inst.n)
    return sim.marginal(sim.key_from_informative(informative), task)


def check_not_obviously_dominated(trace, inst, mech, tol=DEFAULT_EVAL_TOL) -> bool:
    """
    True iff no stop in the trace leaves a remaining recommended task
    with positive one-step marginal utility.
    """
    sim = SequentialSimulator.for_mechanism(inst, mech, tol=tol)
    for step in trace:
        if step.action is not None:
            continue
        key = sim.key_from_informative(step.informative)
        for task in sim.recommendation - set(step.completed):
            if sim.marginal(key, task) > tol:
                logger.debug(f"Stop after {sorted(step.completed)} leaves task {task} with positive marginal")
                return False
    return True


def verify_sequential(inst, mech, guarantee=None, strat=None, tol=DEFAULT_EVAL_TOL) -> SequentialCheck:
    """Check the completion probability a sequential construction promises"""
    if guarantee is None:
        case = getattr(getattr(mech, 'provenance', None), 'case', None)
        guarantee = SEQUENTIAL_GUARANTEES.get(case, 1.0)
    result = sequential_simulate(inst, mech, strat, tol)
    not_dominated = check_not_obviously_dominated(result.trace, inst, mech, tol)
    holds = not_dominated and result.completion_prob_all >= guarantee - tol
    if not holds:
        logger.warning(f"Sequential check failed: P(all)={result.completion_prob_all:.6g} < {guarantee:.6g}")
    return SequentialCheck(holds, guarantee, result.completion_prob_all, result.expected_value, not_dominated)
