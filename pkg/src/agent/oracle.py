"""
Exact agent oracles

Expected utility, best response and incentive-compatibility checks for
every rule family. Structured rules are evaluated in closed form or by
convolution; tabular rules through the joint (outcome, report)
distribution, built as a Kronecker product of per-task kernels.
"""

import itertools
import logging
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence

import numpy as np

from ..config.config_loader import (
    DEFAULT_EVAL_TOL,
    DEFAULT_GUESS_NODE_LIMIT,
    DEFAULT_MERGE_TOL,
    DEFAULT_STRUCTURED_LIMIT,
    DEFAULT_TABULAR_LIMIT,
    DEFAULT_TO_TABULAR_LIMIT,
)
from ..model import Trit, iter_signal_profiles, signal_index
from ..scoring import (
    ReportKind,
    SingleTaskRule,
    TabularRule,
    ThresholdRule,
    TruncatedSeparateRule,
    expected_score,
    expected_score_reports,
    is_structured,
    merge_support,
)
from ..utils import LoggingManager
from ..utils.errors import OracleSizeLimitError, ValidationError
from .policy import BestResponse, ICReport, ReportMap, ReportPolicy

logger = logging.getLogger(__name__)


def subsets_in_order(ids: Sequence[int]) -> Iterator[FrozenSet[int]]:
    """All subsets, smaller first, lexicographic within a size"""
    ids = sorted(ids)
    for size in range(len(ids) + 1):
        for combo in itertools.combinations(ids, size):
            yield frozenset(combo)


# ---------------------------------------------------------------------------
# tabular kernels

def _task_kernel(p: float, guessing: bool) -> np.ndarray:
    """P(report | state) for one task as a 2 x 3 matrix, columns ⊥, 0, 1"""
    kernel = np.zeros((2, 3))
    for state in (0, 1):
        kernel[state, int(Trit.from_bit(state))] += p
        if guessing:
            kernel[state, int(Trit.ZERO)] += (1.0 - p) / 2.0
            kernel[state, int(Trit.ONE)] += (1.0 - p) / 2.0
        else:
            kernel[state, int(Trit.BOT)] += 1.0 - p
    return kernel


def joint_report_distribution(inst, effort: Iterable[int], guess_set: Iterable[int] = ()) -> np.ndarray:
    """P(omega, sigma) as a (2^n, 3^n) matrix under the uniform prior"""
    effort = set(effort)
    guess_set = set(guess_set)
    joint = np.ones((1, 1))
    for task in inst.tasks:
        p = task.prob if task.id in effort else 0.0
        joint = np.kron(joint, _task_kernel(p, task.id in guess_set))
    return joint / 2.0 ** inst.n


def _tabular_values(inst, rule: TabularRule, effort) -> np.ndarray:
    """V[sigma, r]: joint weight of receiving sigma and being paid for reporting r"""
    joint = joint_report_distribution(inst, effort)
    return joint.T @ rule.table.T


def _best_report_map(values: np.ndarray, n: int, tol: float) -> ReportMap:
    best = values.max(axis=1)
    reports = []
    for s in range(values.shape[0]):
        if values[s, s] >= best[s] - tol:
            reports.append(s)
        else:
            reports.append(int(np.flatnonzero(values[s] >= best[s] - tol)[0]))
    return ReportMap(n, tuple(reports))


def _check_tabular(inst, rule: TabularRule, limit: int):
    if rule.n != inst.n:
        raise ValidationError(f"tabular rule has n={rule.n} but the instance has {inst.n} tasks")
    if rule.n > limit:
        raise OracleSizeLimitError('tabular evaluation', rule.n, limit)


# ---------------------------------------------------------------------------
# expected utility

def expected_utility(inst, rule, effort: Iterable[int], policy=None,
                     to_tabular_limit=DEFAULT_TO_TABULAR_LIMIT,
                     merge_tol=DEFAULT_MERGE_TOL) -> float:
    """Expected score minus the cost of the effort set"""
    effort = frozenset(effort)
    for i in effort:
        if i < 0 or i >= inst.n:
            raise ValidationError(f"unknown task id {i}")
    policy = policy if policy is not None else ReportPolicy.truthful()
    cost = inst.cost_of(effort)

    if is_structured(rule):
        if isinstance(policy, ReportMap):
            raise ValidationError("joint report maps apply to tabular rules only")
        return expected_score(rule, effort, inst.probs(), policy.guess_set, merge_tol) - cost

    _check_tabular(inst, rule, to_tabular_limit)
    if isinstance(policy, ReportMap):
        values = _tabular_values(inst, rule, effort)
        score = float(sum(values[s, r] for s, r in enumerate(policy.reports)))
    else:
        joint = joint_report_distribution(inst, effort, policy.guess_set)
        score = float(np.sum(joint * rule.table.T))
    return score - cost


# ---------------------------------------------------------------------------
# best response

def _truncated_effort_table(rule: TruncatedSeparateRule, support, probs, merge_tol,
                            with_guess_bound=False) -> Dict[FrozenSet[int], tuple]:
    """
    Expected truthful score for every effort subset, sharing prefix
    convolutions, paired with an upper bound on what any guess set can
    add on top of it (0 when with_guess_bound is off).
    """
    per_task = {r.task: r for r in rule.per_task}
    # sums are kept relative to every task reporting bot
    constant = rule.base_score()
    table = {}

    def walk(pos, chosen, truth, free, drift):
        if pos == len(support):
            values, weights = truth
            score = float(weights @ np.clip(values + constant, 0.0, rule.cap))
            gain = 0.0
            if with_guess_bound:
                gain = _lower_kink(free, -constant) - _lower_kink(truth, -constant) + drift
            table[frozenset(chosen)] = (score, max(gain, 0.0))
            return
        r = per_task[support[pos]]
        p = probs[r.task]
        if with_guess_bound:
            walk(pos + 1, chosen, truth, _add_task(free, _free_guess_branches(r, 0.0), merge_tol),
                 drift + _positive_drift(r, 0.0))
            walk(pos + 1, chosen + [r.task], _add_task(truth, _truthful_branches(r, p), merge_tol),
                 _add_task(free, _free_guess_branches(r, p), merge_tol), drift + _positive_drift(r, p))
        else:
            walk(pos + 1, chosen, truth, free, drift)
            walk(pos + 1, chosen + [r.task], _add_task(truth, _truthful_branches(r, p), merge_tol), free, drift)

    point = (np.array([0.0]), np.array([1.0]))
    walk(0, [], point, point, 0.0)
    return table


def _truthful_branches(r: SingleTaskRule, p):
    return [(r.score_correct - r.score_bot, p), (0.0, 1.0 - p)]


def _free_guess_branches(r: SingleTaskRule, p):
    """Guessing on the ⊥ branch with the coin's drift removed"""
    half_spread = 0.5 * (r.score_correct - r.score_wrong)
    return [(r.score_correct - r.score_bot, p),
            (half_spread, 0.5 * (1.0 - p)), (-half_spread, 0.5 * (1.0 - p))]


def _positive_drift(r: SingleTaskRule, p):
    """Largest mean gain of the coin over bot, paid on the ⊥ branch only"""
    return max(0.5 * (r.score_correct + r.score_wrong) - r.score_bot, 0.0) * (1.0 - p)


def _add_task(dist, branches, merge_tol):
    values, weights = dist
    branches = [(v, q) for v, q in branches if q > 0.0]
    return merge_support(np.concatenate([values + v for v, _ in branches]),
                         np.concatenate([weights * q for _, q in branches]), merge_tol)


def _lower_kink(dist, point, other=None):
    """E[(point - S)^+] for S = dist (+ other, independent)"""
    values, weights = dist
    if other is not None:
        values = values[:, None] + other[0][None, :]
        weights = weights[:, None] * other[1][None, :]
    return float(np.sum(weights * np.maximum(point - values, 0.0)))


def _upper_kink(dist, point, other=None):
    """E[(S - point)^+] for S = dist (+ other, independent)"""
    values, weights = dist
    if other is not None:
        values = values[:, None] + other[0][None, :]
        weights = weights[:, None] * other[1][None, :]
    return float(np.sum(weights * np.maximum(values - point, 0.0)))


def _guess_candidates(rule, tol) -> Optional[List[FrozenSet[int]]]:
    """
    Report policies that can possibly be optimal for a structured rule,
    or None when a truncated rule needs the guess search.
    """
    if isinstance(rule, ThresholdRule):
        # a guess multiplies the score by 1/2 and can add at most one doubling
        return [frozenset()]
    if isinstance(rule, SingleTaskRule):
        coin = 0.5 * (rule.score_correct + rule.score_wrong)
        return [frozenset((rule.task,))] if coin > rule.score_bot + tol else [frozenset()]
    coins_fair = all(0.5 * (r.score_correct + r.score_wrong) <= r.score_bot + tol
                     and min(r.score_wrong, r.score_bot, r.score_correct) >= 0.0
                     for r in rule.per_task)
    if coins_fair and rule.shift <= tol:
        # every reachable unclamped sum is >= 0, where the clamp is concave
        return [frozenset()]
    return None


class _GuessSearch:
    """
    Branch and bound over guess sets for one truncated rule.

    The clamped score splits as (S + K) + E[(-K - S)^+] - E[(S + K - cap)^+].
    Guessing with a drift-free coin is a mean-preserving spread of S, so it
    can only raise the first kink term and only lower the second; a positive
    coin drift adds at most its own mean on the ⊥ branch. A node is pruned
    once its bound cannot beat the incumbent.
    """

    def __init__(self, inst, rule: TruncatedSeparateRule, probs, node_limit, tol, merge_tol):
        self.inst = inst
        self.rule = rule
        self.probs = probs
        self.node_limit = node_limit
        self.tol = tol
        self.merge_tol = merge_tol
        self.constant = rule.base_score()
        self.nodes = 0

    def improve(self, effort: FrozenSet[int], incumbent: BestResponse) -> BestResponse:
        """Best guess policy for this effort set if it beats the incumbent"""
        base = (np.array([0.0]), np.array([1.0]))
        branching = []
        for r in sorted(self.rule.per_task, key=lambda r: r.task):
            p = self.probs[r.task] if r.task in effort else 0.0
            truth = _truthful_branches(r, p)
            if p >= 1.0 or r.score_correct == r.score_wrong == r.score_bot:
                base = _add_task(base, truth, self.merge_tol)
                continue
            branching.append((r.task, truth, _free_guess_branches(r, p), _positive_drift(r, p)))

        m = len(branching)
        suffix_truth = [base] * (m + 1)
        suffix_free = [base] * (m + 1)
        suffix_drift = [0.0] * (m + 1)
        for k in reversed(range(m)):
            _, truth, free, drift = branching[k]
            suffix_truth[k] = _add_task(suffix_truth[k + 1], truth, self.merge_tol)
            suffix_free[k] = _add_task(suffix_free[k + 1], free, self.merge_tol)
            suffix_drift[k] = suffix_drift[k + 1] + drift
        values, weights = suffix_truth[0]
        mean_score = float(weights @ values) + self.constant
        cost = self.inst.cost_of(effort)
        best = incumbent

        def search(k, prefix, drift, guessed):
            nonlocal best
            self.nodes += 1
            if self.nodes > self.node_limit:
                raise OracleSizeLimitError('best_response guess search', self.nodes, self.node_limit)
            if k == m:
                if not guessed:
                    return
                guess_set = frozenset(guessed)
                score = expected_score(self.rule, effort, self.probs, guess_set, self.merge_tol)
                if score - cost > best.utility + self.tol:
                    best = BestResponse(effort, ReportPolicy(guess_set), score - cost, score)
                return
            bound = (mean_score
                     + _lower_kink(prefix, -self.constant, suffix_free[k])
                     - _upper_kink(prefix, self.rule.cap - self.constant, suffix_truth[k])
                     + drift + suffix_drift[k] - cost)
            if bound <= best.utility + self.tol:
                return
            task, truth, free, task_drift = branching[k]
            search(k + 1, _add_task(prefix, truth, self.merge_tol), drift, guessed)
            search(k + 1, _add_task(prefix, free, self.merge_tol), drift + task_drift, guessed + [task])

        search(0, (np.array([0.0]), np.array([1.0])), 0.0, [])
        return best


def _structured_best_response(inst, rule, structured_limit, guess_node_limit, tol, merge_tol) -> BestResponse:
    support = sorted(i for i in rule.support if i < inst.n)
    if len(support) > structured_limit:
        raise OracleSizeLimitError('best_response', len(support), structured_limit)

    probs = inst.probs()
    guesses = _guess_candidates(rule, tol)

    if isinstance(rule, TruncatedSeparateRule):
        search = _GuessSearch(inst, rule, probs, guess_node_limit, tol, merge_tol) if guesses is None else None
        table = _truncated_effort_table(rule, support, probs, merge_tol, with_guess_bound=search is not None)
        best = None
        for effort in subsets_in_order(support):
            score, guess_gain = table[effort]
            utility = score - inst.cost_of(effort)
            if best is None or utility > best.utility + tol:
                best = BestResponse(effort, ReportPolicy.truthful(), utility, score)
            if search is not None and utility + guess_gain > best.utility + tol:
                best = search.improve(effort, best)
        if search is not None:
            logger.debug(f"Guess search visited {search.nodes} nodes")
        return best

    best = None
    for effort in subsets_in_order(support):
        cost = inst.cost_of(effort)
        for guess_set in guesses:
            score = expected_score(rule, effort, probs, guess_set, merge_tol)
            utility = score - cost
            if best is None or utility > best.utility + tol:
                best = BestResponse(effort, ReportPolicy(guess_set), utility, score)
    return best


def _tabular_best_response(inst, rule: TabularRule, tabular_limit, tol) -> BestResponse:
    _check_tabular(inst, rule, tabular_limit)
    best = None
    for effort in subsets_in_order(range(inst.n)):
        values = _tabular_values(inst, rule, effort)
        report_map = _best_report_map(values, inst.n, tol)
        score = float(sum(values[s, r] for s, r in enumerate(report_map.reports)))
        utility = score - inst.cost_of(effort)
        if best is None or utility > best.utility + tol:
            best = BestResponse(effort, report_map, utility, score)
    return best


def best_response(inst, rule, structured_limit=DEFAULT_STRUCTURED_LIMIT,
                  tabular_limit=DEFAULT_TABULAR_LIMIT, guess_node_limit=DEFAULT_GUESS_NODE_LIMIT,
                  tol=DEFAULT_EVAL_TOL, merge_tol=DEFAULT_MERGE_TOL) -> BestResponse:
    """
    The agent's utility-maximizing effort set and reporting policy.

    Ties (within tol) go to the smaller effort set, then to the
    lexicographically smaller one, then to truthful reporting.
    """
    if is_structured(rule):
        br = _structured_best_response(inst, rule, structured_limit, guess_node_limit, tol, merge_tol)
    else:
        br = _tabular_best_response(inst, rule, tabular_limit, tol)
    logger.debug(f"Best response to {rule.kind} rule: effort={sorted(br.effort)}, utility={br.utility:.6g}")
    return br


def verify_ic(inst, mech, tol=DEFAULT_EVAL_TOL, **limits) -> ICReport:
    """
    Check that exerting effort on the recommendation set and reporting
    truthfully is a best response.
    """
    recommended = frozenset(mech.recommendation)
    to_tabular_limit = limits.pop('to_tabular_limit', DEFAULT_TO_TABULAR_LIMIT)
    rec_utility = expected_utility(inst, mech.rule, recommended, to_tabular_limit=to_tabular_limit)
    br = best_response(inst, mech.rule, tol=tol, **limits)
    gap = br.utility - rec_utility
    holds = gap <= tol

    notes = []
    if not holds:
        notes.append(f"deviation to effort {sorted(br.effort)} gains {gap:.6g}")
        logger.info(f"IC fails for recommendation {sorted(recommended)}: {notes[-1]}")
    return ICReport(holds=holds, gap=gap, worst_deviation=br,
                    recommended_utility=rec_utility, notes=tuple(notes))


# ---------------------------------------------------------------------------
# properness and the monotonicity construction

def proper_deviation_gap(inst, rule, effort: Optional[Iterable[int]] = None, limit=10,
                         merge_tol=DEFAULT_MERGE_TOL) -> float:
    """
    Largest gain from misreporting, over every received signal profile.

    Structured rules are checked against per-task deviations: flipping an
    informative signal or guessing instead of reporting ⊥. Tabular rules
    against every joint reporting map. A value <= tolerance means
    truthful reporting is optimal.
    """
    if not is_structured(rule):
        _check_tabular(inst, rule, limit)
        effort = range(inst.n) if effort is None else effort
        values = _tabular_values(inst, rule, effort)
        reach = values.shape[0]
        weights = joint_report_distribution(inst, effort).sum(axis=0)
        gaps = [(values[s].max() - values[s, s]) / weights[s] for s in range(reach) if weights[s] > 0.0]
        return float(max(gaps)) if gaps else 0.0

    support = sorted(rule.support)
    if len(support) > limit:
        raise OracleSizeLimitError('proper_deviation_gap', len(support), limit)
    effort = set(support if effort is None else effort) & set(support)

    worst = 0.0
    for informative in subsets_in_order(effort):
        truthful = {i: ReportKind.CORRECT if i in informative else ReportKind.BOT for i in support}
        base = expected_score_reports(rule, truthful, merge_tol)
        options = [
            (ReportKind.CORRECT, ReportKind.WRONG) if i in informative else (ReportKind.BOT, ReportKind.COIN)
            for i in support
        ]
        for kinds in itertools.product(*options):
            score = expected_score_reports(rule, dict(zip(support, kinds)), merge_tol)
            worst = max(worst, score - base)
    return worst


@LoggingManager.log_execution_time
def restrict_tabular_rule(inst, rule: TabularRule, psi: Iterable[int], sub_psi: Iterable[int]) -> TabularRule:
    """
    A rule that makes sub_psi incentive compatible whenever psi is.

    Reports on sub_psi are kept; signals for psi minus sub_psi are
    simulated from the realized state (informative w.p. p_i, else ⊥);
    everything outside psi reads as ⊥.
    """
    psi = set(psi)
    sub_psi = set(sub_psi)
    if not sub_psi <= psi:
        raise ValidationError("sub_psi must be a subset of psi")
    _check_tabular(inst, rule, DEFAULT_TO_TABULAR_LIMIT)

    n = inst.n
    simulated = sorted(psi - sub_psi)
    table = np.zeros_like(rule.table)
    for sigma in iter_signal_profiles(n):
        row = signal_index(sigma)
        for omega_index in range(2 ** n):
            omega = tuple((omega_index >> (n - 1 - i)) & 1 for i in range(n))
            total = 0.0
            for flags in itertools.product((True, False), repeat=len(simulated)):
                prob = 1.0
                reported = [sigma[i] if i in sub_psi else Trit.BOT for i in range(n)]
                for task, revealed in zip(simulated, flags):
                    p = inst.tasks[task].prob
                    prob *= p if revealed else 1.0 - p
                    reported[task] = Trit.from_bit(omega[task]) if revealed else Trit.BOT
                if prob > 0.0:
                    total += prob * rule.table[signal_index(reported), omega_index]
            table[row, omega_index] = total
    return TabularRule(n, table, cap=rule.cap)
