"""
Tabular view of scoring rules and belief-based scoring.
"""

import logging
from typing import Sequence, Tuple

import numpy as np

from ..config.config_loader import DEFAULT_EVAL_TOL, DEFAULT_TO_TABULAR_LIMIT
from ..model import iter_outcomes, iter_signal_profiles, signal_from_index
from ..utils.errors import OracleSizeLimitError, ValidationError
from .rules import TabularRule, is_structured

logger = logging.getLogger(__name__)

BELIEF_WRAPPER_LIMIT = 4


def to_tabular(rule, n: int, limit=DEFAULT_TO_TABULAR_LIMIT) -> TabularRule:
    """Expand a structured rule into its full (signal, outcome) table"""
    if isinstance(rule, TabularRule):
        if rule.n != n:
            raise ValidationError(f"tabular rule has n={rule.n}, asked for n={n}")
        return rule
    if n > limit:
        raise OracleSizeLimitError('to_tabular', n, limit)
    if any(i >= n for i in rule.support):
        raise ValidationError(f"rule refers to tasks outside 0..{n - 1}")
    if not is_structured(rule):
        raise TypeError(f"cannot tabulate {type(rule).__name__}")

    outcomes = list(iter_outcomes(n))
    table = np.array([
        [rule.realized_score(sigma, omega) for omega in outcomes]
        for sigma in iter_signal_profiles(n)
    ])
    logger.debug(f"Tabulated {rule.kind} rule into a {table.shape} table")
    return TabularRule(n, table, cap=rule.cap)


def max_over_separate_score(beliefs: Sequence[float], outcome: Sequence[int]) -> float:
    """
    Score 1 if the most confident per-task prediction is right.

    Picks the task maximizing max(mu, 1 - mu), lowest index on ties, and
    predicts 1 when mu > 1/2, otherwise 0.
    """
    beliefs = np.asarray(beliefs, dtype=float)
    if len(beliefs) != len(outcome):
        raise ValidationError("beliefs and outcome must have the same length")
    if len(beliefs) == 0:
        return 0.0
    confidence = np.maximum(beliefs, 1.0 - beliefs)
    i = int(np.argmax(confidence))
    prediction = 1 if beliefs[i] > 0.5 else 0
    return 1.0 if prediction == outcome[i] else 0.0


def belief_proper_wrapper(rule: TabularRule, belief, tol=DEFAULT_EVAL_TOL,
                          limit=BELIEF_WRAPPER_LIMIT) -> Tuple[tuple, float]:
    """
    Best report for a belief over outcomes.

    ``belief`` is a length-2^n vector in outcome-index order. Ties go to
    the lexicographically smallest profile under ⊥ < 0 < 1.
    """
    if rule.n > limit:
        raise OracleSizeLimitError('belief_proper_wrapper', rule.n, limit)
    belief = np.asarray(belief, dtype=float)
    if belief.shape != (2 ** rule.n,):
        raise ValidationError(f"belief must have length {2 ** rule.n}")
    if np.any(belief < -tol) or abs(belief.sum() - 1.0) > 1e-9:
        raise ValidationError("belief must be a probability distribution")

    expected = rule.table @ belief
    best = float(expected.max())
    index = int(np.flatnonzero(expected >= best - tol)[0])
    return signal_from_index(index, rule.n), float(expected[index])
