"""
Scoring rule families

Structured rules (single-task, truncated separate, threshold) keep
their parameters; the tabular rule is a dense (signal, outcome) table.
Every family answers ``realized_score(sigma, omega)`` so any of them can
be expanded into a table for cross-checking.
"""

import logging
import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import ClassVar, FrozenSet, Mapping, Sequence, Tuple, Union

import numpy as np

from ..config.config_loader import DEFAULT_EVAL_TOL, DEFAULT_MASS_TOL
from ..model import Trit, signal_index, outcome_index
from ..utils.errors import NotIncentivizableError, ValidationError

logger = logging.getLogger(__name__)

INFLATED_CAP = 11.0
TRUNCATED_SCALE = 9.0 / 8.0


class ReportKind(Enum):
    """What a task's report does relative to its true state"""
    CORRECT = 'correct'
    WRONG = 'wrong'
    BOT = 'bot'
    COIN = 'coin'   # a uniform guess: CORRECT or WRONG w.p. 1/2


def _report_kind(trit, state):
    if trit is Trit.BOT:
        return ReportKind.BOT
    return ReportKind.CORRECT if trit.to_bit() == state else ReportKind.WRONG


@dataclass(frozen=True)
class SingleTaskRule:
    task: int
    score_bot: float
    score_correct: float
    score_wrong: float = 0.0

    kind: ClassVar[str] = 'single'

    @property
    def support(self) -> FrozenSet[int]:
        return frozenset((self.task,))

    @property
    def cap(self):
        return max(self.score_bot, self.score_correct, self.score_wrong)

    def score_of(self, report: ReportKind) -> float:
        if report is ReportKind.BOT:
            return self.score_bot
        if report is ReportKind.CORRECT:
            return self.score_correct
        if report is ReportKind.WRONG:
            return self.score_wrong
        return 0.5 * (self.score_correct + self.score_wrong)

    def realized_score(self, sigma, omega) -> float:
        return self.score_of(_report_kind(Trit(sigma[self.task]), omega[self.task]))

    def scaled(self, factor):
        return replace(self,
                       score_bot=self.score_bot * factor,
                       score_correct=self.score_correct * factor,
                       score_wrong=self.score_wrong * factor)

    def relabel(self, mapping: Mapping[int, int]):
        return replace(self, task=mapping[self.task])


@dataclass(frozen=True)
class TruncatedSeparateRule:
    """clamp(sum of per-task scores - shift, 0, cap)"""
    per_task: Tuple[SingleTaskRule, ...]
    shift: float
    cap: float
    scale: float = 1.0

    kind: ClassVar[str] = 'truncated_separate'

    def __post_init__(self):
        if self.cap <= 0:
            raise ValidationError(f"cap must be positive, got {self.cap}")

    @property
    def support(self) -> FrozenSet[int]:
        return frozenset(r.task for r in self.per_task)

    def base_score(self):
        """Unclamped score when every task reports bot"""
        return sum(r.score_bot for r in self.per_task) - self.shift

    def clamp(self, total):
        return min(max(total, 0.0), self.cap)

    def realized_score(self, sigma, omega) -> float:
        total = sum(r.realized_score(sigma, omega) for r in self.per_task)
        return self.clamp(total - self.shift)

    def scaled(self, factor):
        return replace(self,
                       per_task=tuple(r.scaled(factor) for r in self.per_task),
                       shift=self.shift * factor,
                       cap=self.cap * factor)

    def relabel(self, mapping: Mapping[int, int]):
        return replace(self, per_task=tuple(r.relabel(mapping) for r in self.per_task))


@dataclass(frozen=True)
class ThresholdRule:
    """
    Pays cap once eta correct predictions are reported inside the
    recommendation set, cap * 2^(k - eta) for k < eta correct ones, and
    0 as soon as any informative report in the set is wrong.
    """
    recommendation: FrozenSet[int]
    threshold: int = 1
    cap: float = 1.0

    kind: ClassVar[str] = 'threshold'

    def __post_init__(self):
        object.__setattr__(self, 'recommendation', frozenset(self.recommendation))
        if isinstance(self.threshold, bool) or not isinstance(self.threshold, int) or self.threshold < 1:
            raise ValidationError(f"threshold must be a positive integer, got {self.threshold!r}")
        if self.cap <= 0:
            raise ValidationError(f"cap must be positive, got {self.cap}")

    @property
    def support(self) -> FrozenSet[int]:
        return self.recommendation

    def score_for_count(self, correct: int) -> float:
        return self.cap * 2.0 ** (min(correct, self.threshold) - self.threshold)

    def realized_score(self, sigma, omega) -> float:
        correct = 0
        for i in self.recommendation:
            kind = _report_kind(Trit(sigma[i]), omega[i])
            if kind is ReportKind.WRONG:
                return 0.0
            if kind is ReportKind.CORRECT:
                correct += 1
        return self.score_for_count(correct)

    def scaled(self, factor):
        return replace(self, cap=self.cap * factor)

    def relabel(self, mapping: Mapping[int, int]):
        return replace(self, recommendation=frozenset(mapping[i] for i in self.recommendation))


@dataclass(frozen=True, eq=False)
class TabularRule:
    """
    A general rule S(sigma, omega) stored as a (3^n, 2^n) array.

    Rows are signal profiles, columns outcomes, both in the mixed-radix
    order of ``src.model.signals``.
    """
    n: int
    table: np.ndarray
    cap: float = 1.0

    kind: ClassVar[str] = 'tabular'

    def __post_init__(self):
        table = np.asarray(self.table, dtype=float)
        if table.shape != (3 ** self.n, 2 ** self.n):
            raise ValidationError(
                f"table shape {table.shape} does not match n={self.n}: expected {(3 ** self.n, 2 ** self.n)}")
        if table.size and (table.min() < -DEFAULT_EVAL_TOL or table.max() > self.cap + DEFAULT_EVAL_TOL):
            raise ValidationError(f"tabular scores must lie in [0, {self.cap}]")
        table.setflags(write=False)
        object.__setattr__(self, 'table', table)

    @classmethod
    def zeros(cls, n, cap=1.0):
        return cls(n, np.zeros((3 ** n, 2 ** n)), cap)

    @property
    def support(self) -> FrozenSet[int]:
        return frozenset(range(self.n))

    def score(self, sigma, omega) -> float:
        return float(self.table[signal_index(sigma), outcome_index(omega)])

    realized_score = score

    def expected_given_signal(self, sigma, posterior):
        """E[S(sigma, omega)] for a distribution over outcomes (length 2^n)"""
        return float(self.table[signal_index(sigma)] @ np.asarray(posterior, dtype=float))

    def scaled(self, factor):
        return TabularRule(self.n, self.table * factor, self.cap * factor)

    def __eq__(self, other):
        return (isinstance(other, TabularRule) and self.n == other.n
                and self.cap == other.cap and np.array_equal(self.table, other.table))

    __hash__ = None


ScoringRule = Union[SingleTaskRule, TruncatedSeparateRule, ThresholdRule, TabularRule]
StructuredRule = Union[SingleTaskRule, TruncatedSeparateRule, ThresholdRule]


def is_structured(rule) -> bool:
    return isinstance(rule, (SingleTaskRule, TruncatedSeparateRule, ThresholdRule))


def realized_score(rule: ScoringRule, sigma: Sequence[int], omega: Sequence[int]) -> float:
    """The payment for reporting sigma when the state is omega"""
    return float(rule.realized_score(tuple(Trit(s) for s in sigma), tuple(omega)))


def single_budget_minimal(task, tol=DEFAULT_MASS_TOL) -> SingleTaskRule:
    """
    Cheapest rule that makes one task worth its effort.

    Pays c/p on bot and 2c/p on a correct report, leaving the agent
    exactly indifferent between effort and none.
    """
    ratio = 2.0 * task.cost / task.prob
    if ratio > 1.0 + tol:
        raise NotIncentivizableError(task.id, ratio)
    bot = task.cost / task.prob
    return SingleTaskRule(task.id, score_bot=bot, score_correct=2.0 * bot, score_wrong=0.0)


def build_truncated_separate(inst, psi, cap=INFLATED_CAP, scale=TRUNCATED_SCALE) -> TruncatedSeparateRule:
    """
    Sum of scaled budget-minimal rules over psi, shifted so that the
    all-bot score is cap/2, then clamped to [0, cap].
    """
    if cap <= 0:
        raise ValidationError(f"cap must be positive, got {cap}")
    ids = sorted(psi)
    for i in ids:
        if i < 0 or i >= inst.n:
            raise ValidationError(f"unknown task id {i}")

    per_task = tuple(single_budget_minimal(inst.tasks[i], tol=math.inf).scaled(scale) for i in ids)
    shift = -cap / 2.0 + scale * sum(inst.tasks[i].cost / inst.tasks[i].prob for i in ids)
    logger.debug(f"Truncated separate rule over {ids}: cap={cap}, scale={scale}, shift={shift:.6g}")
    return TruncatedSeparateRule(per_task=per_task, shift=shift, cap=cap, scale=scale)
