import itertools

import numpy as np
import pytest

from conftest import make_instance
from src.agent import verify_ic
from src.bounds import MAIN, prob_budget_bound, symmetric_effort_upper, threshold_stop_level
from src.mechanisms import Mechanism
from src.optlp import (
    EQ,
    GE,
    LE,
    LinearProgram,
    LPStatus,
    ic_feasible,
    ic_opt_exact,
    simplex_solve,
    symmetric_feasible,
    symmetric_max_effort,
)
from src.utils.errors import OracleSizeLimitError, ValidationError


class TestSimplex:
    def test_single_variable(self):
        lp = LinearProgram(1).set_objective([1.0]).add_constraint([1.0], LE, 3.0)
        result = simplex_solve(lp)
        assert result.optimal
        assert result.objective == pytest.approx(3.0)

    def test_infeasible(self):
        lp = LinearProgram(1).add_constraint([1.0], LE, -1.0)
        assert simplex_solve(lp).status is LPStatus.INFEASIBLE

    def test_unbounded(self):
        lp = LinearProgram(2).set_objective([1.0, 1.0]).add_constraint([1.0, -1.0], LE, 1.0)
        assert simplex_solve(lp).status is LPStatus.UNBOUNDED

    def test_two_variables(self):
        lp = LinearProgram(2).set_objective([1.0, 1.0])
        lp.add_constraint([1.0, 2.0], LE, 4.0).add_constraint([3.0, 1.0], LE, 6.0)
        result = simplex_solve(lp)
        assert result.objective == pytest.approx(2.8)
        assert result.x == pytest.approx([1.6, 1.2])
        assert lp.check(result.x)

    def test_minimize_with_equality(self):
        lp = LinearProgram(2).set_objective({0: 2.0, 1: 3.0}, maximize=False)
        lp.add_constraint({0: 1.0, 1: 1.0}, EQ, 1.0).add_constraint({1: 1.0}, GE, 0.25)
        result = simplex_solve(lp)
        assert result.objective == pytest.approx(2.25)
        assert result.x == pytest.approx([0.75, 0.25])

    def test_bounds_and_free_variables(self):
        lp = LinearProgram(2).set_objective([-1.0, 1.0])
        lp.set_bounds(0, -np.inf, np.inf).set_bounds(1, 0.0, 2.0)
        lp.add_constraint([1.0, 0.0], GE, -5.0)
        result = simplex_solve(lp)
        assert result.objective == pytest.approx(7.0)
        assert result.x == pytest.approx([-5.0, 2.0])

    def test_size_limit(self):
        lp = LinearProgram(10)
        with pytest.raises(OracleSizeLimitError):
            simplex_solve(lp, size_limit=5)

    def test_bad_rows(self):
        lp = LinearProgram(2)
        with pytest.raises(ValidationError):
            lp.add_constraint([1.0], LE, 1.0)
        with pytest.raises(ValidationError):
            lp.add_constraint([1.0, 1.0], '<', 1.0)
        with pytest.raises(ValidationError):
            lp.set_bounds(0, 2.0, 1.0)


class TestICOpt:
    def test_single_incentivizable_task(self):
        opt = ic_opt_exact(make_instance((0.2, 0.5, 1.0)))
        assert opt.value == pytest.approx(1.0)
        assert opt.recommendation == frozenset({0})

    def test_single_costly_task(self):
        opt = ic_opt_exact(make_instance((0.3, 0.5, 1.0)))
        assert opt.value == 0.0
        assert opt.recommendation == frozenset()

    def test_symmetric_pair(self):
        opt = ic_opt_exact(make_instance((0.2, 0.5, 1.0), (0.2, 0.5, 1.0)))
        assert opt.value in (1.0, 2.0)
        assert opt.value >= 1.0

    def test_witness_is_incentive_compatible(self):
        inst = make_instance((0.1, 0.5, 1.0), (0.15, 0.6, 2.0))
        opt = ic_opt_exact(inst)
        report = verify_ic(inst, Mechanism(opt.rule, opt.recommendation), tol=1e-6)
        assert report.holds

    def test_witness_scales_with_budget(self):
        opt = ic_opt_exact(make_instance((0.4, 0.5, 1.0), budget=2.0))
        assert opt.value == pytest.approx(1.0)
        assert opt.rule.cap == pytest.approx(2.0)

    def test_empty_set_is_feasible(self, single_task):
        feasible, rule = ic_feasible(single_task, [])
        assert feasible
        assert rule.n == 1

    @pytest.mark.parametrize("low, high", [(0.05, 0.2), (0.1, 0.24), (0.2, 0.3)])
    def test_monotone_in_cost(self, low, high):
        cheap = ic_opt_exact(make_instance((low, 0.5, 1.0), (0.2, 0.5, 2.0)))
        costly = ic_opt_exact(make_instance((high, 0.5, 1.0), (0.2, 0.5, 2.0)))
        assert cheap.value >= costly.value - 1e-9

    def test_size_limit(self):
        inst = make_instance(*[(0.1, 0.5, 1.0)] * 4)
        with pytest.raises(OracleSizeLimitError):
            ic_opt_exact(inst)

    def test_document(self, single_task):
        doc = ic_opt_exact(single_task).to_document(id_map=(3,))
        assert doc['recommendation'] == [3]
        assert doc['rule']['kind'] == 'tabular'

    @pytest.mark.slow
    @pytest.mark.parametrize("size", [2, 3])
    def test_incentivizable_sets_respect_probability_budget(self, size):
        # (p, 2c/p) pairs inside the bound's validity region
        kinds = [(0.1, 0.94), (0.1, 0.99), (0.25, 0.94), (0.25, 0.99)]
        for chosen in itertools.combinations_with_replacement(kinds, size):
            inst = make_instance(*[(ratio * p / 2, p, 1.0) for p, ratio in chosen])
            feasible, _ = ic_feasible(inst, inst.ids)
            report = prob_budget_bound(inst.tasks, MAIN)
            assert report.applicable
            if feasible:
                assert report.satisfied, f"{chosen}: sum p above {report.value:.4g}"


class TestSymmetric:
    def test_single_task_level(self):
        feasible, rule = symmetric_feasible(3, 0.5, 0.1, 1)
        assert feasible
        for level in range(4):
            assert rule.utility(1, 0.5, 0.1) >= rule.utility(level, 0.5, 0.1) - 1e-6

    def test_free_effort(self):
        feasible, _ = symmetric_feasible(4, 0.3, 0.0, 4)
        assert feasible

    def test_level_above_effort_cap(self):
        feasible, rule = symmetric_feasible(2, 0.2, 0.095, 2)
        assert not feasible
        assert rule is None

    def test_bad_target(self):
        with pytest.raises(ValidationError):
            symmetric_feasible(2, 0.5, 0.1, 3)

    @pytest.mark.parametrize("n, p, c, expected", [
        (3, 0.5, 0.3, 0),
        (4, 0.3, 0.0, 4),
    ])
    def test_max_effort(self, n, p, c, expected):
        assert symmetric_max_effort(n, p, c) == expected

    @pytest.mark.parametrize("p, c", [(0.5, 0.1), (0.3, 0.05), (0.2, 0.09)])
    def test_max_effort_beats_threshold(self, p, c):
        n = 4
        assert symmetric_max_effort(n, p, c) >= threshold_stop_level(p, c, n)

    @pytest.mark.parametrize("n", [2, 4, 6])
    @pytest.mark.parametrize("p", [0.1, 0.2, 0.3, 0.4, 0.5])
    @pytest.mark.parametrize("eps", [0.002, 0.01, 0.03, 0.06, 0.09, 0.12])
    def test_max_effort_within_upper_bound(self, n, p, eps):
        c = p / (2.0 * (1.0 + eps))
        assert symmetric_max_effort(n, p, c) < symmetric_effort_upper(p, c) + 1

    def test_rule_structure(self):
        _, rule = symmetric_feasible(3, 0.5, 0.1, 2)
        scores = rule.scores
        for k in range(3):
            assert scores[k + 1] >= scores[k] - 1e-7
            assert scores[k] >= scores[k + 1] / 2 - 1e-7
