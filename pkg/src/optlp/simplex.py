"""
Dense two-phase simplex

The program is brought to standard form (shifted nonnegative
variables, nonnegative right-hand sides, slack/surplus/artificial
columns) and solved on a numpy tableau with Bland's rule, which cannot
cycle. Phase 1 minimizes the artificial mass; phase 2 the objective.
"""

import logging
import math
from typing import Callable, List, Tuple

import numpy as np

from ..config.config_loader import DEFAULT_LP_SIZE_LIMIT, DEFAULT_LP_TOL
from ..utils.errors import LPNumericalError, OracleSizeLimitError
from .lp import EQ, GE, LE, LinearProgram, LPResult, LPStatus

logger = logging.getLogger(__name__)

PIVOT_TOL = 1e-10
PHASE1_TOL = 1e-9
MAX_ITERATIONS = 50_000


class _Tableau:
    """Constraint rows on top, reduced costs in the last row, rhs in the last column"""

    def __init__(self, rows: np.ndarray, rhs: np.ndarray, basis: List[int]):
        m, n = rows.shape
        self.T = np.zeros((m + 1, n + 1))
        self.T[:m, :n] = rows
        self.T[:m, -1] = rhs
        self.basis = list(basis)
        self.iterations = 0

    @property
    def m(self):
        return self.T.shape[0] - 1

    def set_costs(self, costs: np.ndarray):
        """Price out the current basis for minimizing costs.x"""
        self.T[-1, :-1] = costs
        self.T[-1, -1] = 0.0
        for r, col in enumerate(self.basis):
            if costs[col] != 0.0:
                self.T[-1, :] -= costs[col] * self.T[r, :]

    def pivot(self, row: int, col: int):
        T = self.T
        T[row, :] /= T[row, col]
        for r in range(T.shape[0]):
            if r != row and T[r, col] != 0.0:
                T[r, :] -= T[r, col] * T[row, :]
        self.basis[row] = col
        self.iterations += 1

    def _entering(self, allowed: np.ndarray) -> int:
        # Bland: the lowest-index improving column
        candidates = np.flatnonzero(allowed & (self.T[-1, :-1] < -PIVOT_TOL))
        return int(candidates[0]) if candidates.size else -1

    def _leaving(self, col: int) -> int:
        best, best_ratio = -1, math.inf
        for r in range(self.m):
            a = self.T[r, col]
            if a > PIVOT_TOL:
                ratio = self.T[r, -1] / a
                if ratio < best_ratio - PIVOT_TOL or (
                        abs(ratio - best_ratio) <= PIVOT_TOL and self.basis[r] < self.basis[best]):
                    best, best_ratio = r, ratio
        return best

    def run(self, allowed: np.ndarray, max_iterations=MAX_ITERATIONS) -> LPStatus:
        while True:
            if self.iterations >= max_iterations:
                raise LPNumericalError(f"simplex hit the iteration cap ({max_iterations})")
            col = self._entering(allowed)
            if col < 0:
                return LPStatus.OPTIMAL
            row = self._leaving(col)
            if row < 0:
                return LPStatus.UNBOUNDED
            self.pivot(row, col)

    def solution(self, n_cols: int) -> np.ndarray:
        x = np.zeros(n_cols)
        for r, col in enumerate(self.basis):
            x[col] = self.T[r, -1]
        return x


def _standard_form(lp: LinearProgram) -> Tuple[np.ndarray, np.ndarray, np.ndarray, List[int], int, Callable]:
    """
    Rewrite as A y = b, y >= 0, b >= 0, with an identity basis of slack
    and artificial columns.

    Returns the matrix, rhs, minimization costs over y, the initial
    basis, the index of the first artificial column and a map from y
    back to x.
    """
    n = lp.n_vars
    shift = np.where(np.isfinite(lp.lower), lp.lower, 0.0)
    free = ~np.isfinite(lp.lower)
    n_free = int(free.sum())
    free_cols = np.flatnonzero(free)

    rows = [(a, sense, b) for a, sense, b in lp.rows]
    for j in range(n):
        if math.isfinite(lp.upper[j]):
            a = np.zeros(n)
            a[j] = 1.0
            rows.append((a, LE, lp.upper[j]))

    # x = shift + y_plus - y_minus (y_minus only for free variables)
    base_cols = n + n_free
    prepared = []
    for a, sense, b in rows:
        row = np.concatenate([a, -a[free_cols]])
        rhs = b - float(a @ shift)
        if rhs < 0:
            row, rhs = -row, -rhs
            sense = {LE: GE, GE: LE, EQ: EQ}[sense]
        prepared.append((row, sense, rhs))

    n_slack = sum(1 for _, s, _ in prepared if s in (LE, GE))
    n_art = sum(1 for _, s, _ in prepared if s in (GE, EQ))
    total = base_cols + n_slack + n_art
    art_start = base_cols + n_slack

    A = np.zeros((len(prepared), total))
    rhs = np.zeros(len(prepared))
    basis = []
    slack = base_cols
    art = art_start
    for r, (row, sense, b) in enumerate(prepared):
        A[r, :base_cols] = row
        rhs[r] = b
        if sense == LE:
            A[r, slack] = 1.0
            basis.append(slack)
            slack += 1
        elif sense == GE:
            A[r, slack] = -1.0
            A[r, art] = 1.0
            basis.append(art)
            slack += 1
            art += 1
        else:
            A[r, art] = 1.0
            basis.append(art)
            art += 1

    sign = -1.0 if lp.maximize else 1.0
    costs = np.zeros(total)
    costs[:n] = sign * lp.objective
    costs[n:base_cols] = -sign * lp.objective[free_cols]

    def recover(y):
        x = shift + y[:n]
        x[free_cols] -= y[n:base_cols]
        return x

    return A, rhs, costs, basis, art_start, recover


def _drive_out_artificials(tab: _Tableau, art_start: int):
    """Pivot basic artificials (at level zero) out, dropping redundant rows"""
    r = 0
    while r < tab.m:
        if tab.basis[r] < art_start:
            r += 1
            continue
        cols = np.flatnonzero(np.abs(tab.T[r, :art_start]) > PIVOT_TOL)
        if cols.size:
            tab.pivot(r, int(cols[0]))
            r += 1
        else:
            tab.T = np.delete(tab.T, r, axis=0)
            del tab.basis[r]


def simplex_solve(lp: LinearProgram, tol=DEFAULT_LP_TOL, size_limit=DEFAULT_LP_SIZE_LIMIT,
                  max_iterations=MAX_ITERATIONS) -> LPResult:
    """
    Solve a linear program exactly up to floating point.

    Raises:
        OracleSizeLimitError: More variables or constraints than size_limit
        LPNumericalError: Iteration cap reached, or the optimal point fails
            the re-check against the raw constraints
    """
    size = max(lp.n_vars, lp.n_rows)
    if size > size_limit:
        raise OracleSizeLimitError('simplex_solve', size, size_limit)

    A, rhs, costs, basis, art_start, recover = _standard_form(lp)
    tab = _Tableau(A, rhs, basis)
    n_cols = A.shape[1]

    # phase 1
    if art_start < n_cols:
        phase1 = np.zeros(n_cols)
        phase1[art_start:] = 1.0
        tab.set_costs(phase1)
        tab.run(np.ones(n_cols, dtype=bool), max_iterations)
        if -tab.T[-1, -1] > PHASE1_TOL * max(1.0, float(rhs.sum())):
            logger.debug(f"LP infeasible: phase 1 residual {-tab.T[-1, -1]:.3g}")
            return LPResult(LPStatus.INFEASIBLE, iterations=tab.iterations)
        _drive_out_artificials(tab, art_start)

    # phase 2
    allowed = np.zeros(n_cols, dtype=bool)
    allowed[:art_start] = True
    tab.set_costs(costs)
    status = tab.run(allowed, max_iterations)
    if status is LPStatus.UNBOUNDED:
        return LPResult(LPStatus.UNBOUNDED, iterations=tab.iterations)

    x = recover(tab.solution(n_cols))
    worst = lp.violation(x)
    if worst > tol:
        raise LPNumericalError(f"optimal point violates the constraints by {worst:.3g}")
    objective = lp.value(x)
    logger.debug(f"LP optimal after {tab.iterations} pivots: objective {objective:.9g}")
    return LPResult(LPStatus.OPTIMAL, objective, x, tab.iterations)
