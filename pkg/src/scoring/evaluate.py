"""
Exact expected-score evaluation for the structured rule families.

Threshold rules go through the Poisson-binomial distribution of the
number of informative signals; truncated separate rules through an
exact convolution of the per-task score distributions.
"""

import logging
from typing import Iterable, Mapping, Sequence, Tuple

import numpy as np

from ..config.config_loader import DEFAULT_MERGE_TOL
from .rules import (
    ReportKind,
    SingleTaskRule,
    ThresholdRule,
    TruncatedSeparateRule,
)

logger = logging.getLogger(__name__)


def poisson_binomial_pmf(probs: Sequence[float]) -> np.ndarray:
    """pmf of the number of successes among independent Bernoulli(p_i)"""
    # coefficients of prod_i (1 - p_i + p_i x)
    pmf = np.array([1.0])
    for p in probs:
        nxt = np.zeros(len(pmf) + 1)
        nxt[:-1] = pmf * (1.0 - p)
        nxt[1:] += pmf * p
        pmf = nxt
    return pmf


def merge_support(values: np.ndarray, probs: np.ndarray, merge_tol=DEFAULT_MERGE_TOL) -> Tuple[np.ndarray, np.ndarray]:
    """Collapse support points that agree up to merge_tol"""
    if len(values) == 0:
        return values, probs
    keys = np.round(values / merge_tol).astype(np.int64)
    unique_keys, first, inverse = np.unique(keys, return_index=True, return_inverse=True)
    merged = np.zeros(len(unique_keys))
    np.add.at(merged, inverse, probs)
    return values[first], merged


def convolve_discrete(distributions: Iterable[Sequence[Tuple[float, float]]],
                      merge_tol=DEFAULT_MERGE_TOL) -> Tuple[np.ndarray, np.ndarray]:
    """
    Distribution of a sum of independent discrete variables.

    Each input is a list of (value, probability) pairs. Returns sorted
    support values and their probabilities.
    """
    values = np.array([0.0])
    probs = np.array([1.0])
    for dist in distributions:
        dist = [(v, q) for v, q in dist if q > 0.0]
        if not dist:
            continue
        if len(dist) == 1:
            values = values + dist[0][0]
            probs = probs * dist[0][1]
            continue
        values = np.concatenate([values + v for v, _ in dist])
        probs = np.concatenate([probs * q for _, q in dist])
        values, probs = merge_support(values, probs, merge_tol)
    return values, probs


def expected_score_threshold(rule: ThresholdRule, effort: Iterable[int], probs: Sequence[float]) -> float:
    """
    Expected score under optimal reporting.

    Guessing never raises a threshold score, so the agent reports its
    signals as seen and the score is cap * min(1, 2^(m - eta)) for m informative
    signals.
    """
    active = sorted(set(effort) & rule.recommendation)
    pmf = poisson_binomial_pmf([probs[i] for i in active])
    scores = np.array([rule.score_for_count(m) for m in range(len(pmf))])
    return float(pmf @ scores)


def expected_score_threshold_policy(rule: ThresholdRule, effort: Iterable[int],
                                    probs: Sequence[float], guess_set: Iterable[int] = ()) -> float:
    """Expected threshold score when the agent guesses on ⊥ for guess_set"""
    effort = set(effort)
    guess_set = set(guess_set)
    size = len(rule.recommendation) + 1

    # dist[m, g]: m informative-correct reports, g coin guesses
    dist = np.zeros((size, size))
    dist[0, 0] = 1.0
    for i in sorted(rule.recommendation):
        p = probs[i] if i in effort else 0.0
        guessing = i in guess_set
        moves = [((1, 0), p), ((0, 1) if guessing else (0, 0), 1.0 - p)]
        nxt = np.zeros_like(dist)
        for (dm, dg), q in moves:
            if q == 0.0:
                continue
            nxt[dm:, dg:] += q * dist[:size - dm, :size - dg]
        dist = nxt

    m = np.arange(size)[:, None]
    g = np.arange(size)[None, :]
    scores = rule.cap * 2.0 ** (-g) * 2.0 ** (np.minimum(m + g, rule.threshold) - rule.threshold)
    return float(np.sum(dist * scores))


def _task_distribution(rule: SingleTaskRule, p: float, guessing: bool):
    """Score distribution of one task: informative w.p. p, else its ⊥ branch"""
    if guessing:
        bot_branch = [(rule.score_correct, 0.5), (rule.score_wrong, 0.5)]
    else:
        bot_branch = [(rule.score_bot, 1.0)]
    dist = [(rule.score_correct, p)] if p > 0.0 else []
    dist += [(v, (1.0 - p) * q) for v, q in bot_branch]
    return dist


def truncated_sum_distribution(rule: TruncatedSeparateRule, effort: Iterable[int],
                               guess_set: Iterable[int], probs: Sequence[float],
                               merge_tol=DEFAULT_MERGE_TOL):
    """Distribution of the shifted, unclamped sum"""
    effort = set(effort)
    guess_set = set(guess_set)
    values, weights = convolve_discrete(
        (_task_distribution(r, probs[r.task] if r.task in effort else 0.0, r.task in guess_set)
         for r in rule.per_task),
        merge_tol,
    )
    return values - rule.shift, weights


def expected_score_truncated(rule: TruncatedSeparateRule, effort: Iterable[int],
                             guess_set: Iterable[int], probs: Sequence[float],
                             merge_tol=DEFAULT_MERGE_TOL) -> float:
    values, weights = truncated_sum_distribution(rule, effort, guess_set, probs, merge_tol)
    return float(weights @ np.clip(values, 0.0, rule.cap))


def expected_score_single(rule: SingleTaskRule, effort: Iterable[int],
                          guess_set: Iterable[int], probs: Sequence[float]) -> float:
    dist = _task_distribution(rule, probs[rule.task] if rule.task in set(effort) else 0.0,
                              rule.task in set(guess_set))
    return float(sum(v * q for v, q in dist))


def expected_score(rule, effort: Iterable[int], probs: Sequence[float],
                   guess_set: Iterable[int] = (), merge_tol=DEFAULT_MERGE_TOL) -> float:
    """Dispatch on the structured rule family"""
    guess_set = set(guess_set)
    if isinstance(rule, ThresholdRule):
        if guess_set & rule.recommendation:
            return expected_score_threshold_policy(rule, effort, probs, guess_set)
        return expected_score_threshold(rule, effort, probs)
    if isinstance(rule, TruncatedSeparateRule):
        return expected_score_truncated(rule, effort, guess_set, probs, merge_tol)
    if isinstance(rule, SingleTaskRule):
        return expected_score_single(rule, effort, guess_set, probs)
    raise TypeError(f"no structured evaluator for {type(rule).__name__}")


def expected_score_reports(rule, reports: Mapping[int, ReportKind], merge_tol=DEFAULT_MERGE_TOL) -> float:
    """
    Expected score once every task's report kind is fixed.

    Tasks missing from ``reports`` report ⊥. COIN reports are uniform
    guesses; everything else is deterministic relative to the state.
    """
    def kind(i):
        return reports.get(i, ReportKind.BOT)

    if isinstance(rule, ThresholdRule):
        kinds = [kind(i) for i in rule.recommendation]
        if ReportKind.WRONG in kinds:
            return 0.0
        correct = kinds.count(ReportKind.CORRECT)
        coins = kinds.count(ReportKind.COIN)
        return rule.cap * 2.0 ** (-coins) * 2.0 ** (min(correct + coins, rule.threshold) - rule.threshold)

    if isinstance(rule, SingleTaskRule):
        return rule.score_of(kind(rule.task))

    if isinstance(rule, TruncatedSeparateRule):
        dists = []
        for r in rule.per_task:
            k = kind(r.task)
            if k is ReportKind.COIN:
                dists.append([(r.score_correct, 0.5), (r.score_wrong, 0.5)])
            else:
                dists.append([(r.score_of(k), 1.0)])
        values, weights = convolve_discrete(dists, merge_tol)
        return float(weights @ np.clip(values - rule.shift, 0.0, rule.cap))

    raise TypeError(f"no structured evaluator for {type(rule).__name__}")
