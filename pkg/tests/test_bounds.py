import math

import pytest

from conftest import make_coverage, make_instance
from src.agent import best_response
from src.bounds import (
    BERNSTEIN,
    COMPANION,
    HOEFFDING,
    MAIN,
    PosteriorDistribution,
    alg_opt,
    alg_opt_set,
    budget_headroom_bound,
    fractional_knapsack,
    info_gain_single,
    kl_stat,
    pinsker_cost_bound,
    pinsker_size_bound,
    prob_budget_bound,
    symmetric_effort_upper,
    tail_bounds,
    threshold_stop_level,
)
from src.model import Task
from src.scoring import ThresholdRule
from src.utils.errors import OracleSizeLimitError, ValidationError


class TestAlgOpt:
    def test_additive(self):
        inst = make_instance((0.3, 0.5, 6.0), (0.5, 0.5, 10.0), (0.6, 0.5, 12.0))
        value, chosen = alg_opt_set(inst)
        assert value == pytest.approx(18.0)
        assert chosen == frozenset({0, 2})

    def test_zero_budget(self):
        inst = make_instance((0.3, 0.5, 6.0), (0.0, 0.5, 1.0))
        assert alg_opt(inst, budget=0.0) == pytest.approx(1.0)
        assert alg_opt(make_instance((0.3, 0.5, 6.0)), budget=0.0) == 0.0

    def test_single_task(self, single_task):
        assert alg_opt(single_task) == pytest.approx(1.0)

    def test_coverage(self):
        inst = make_coverage([(0.5, 0.5), (0.5, 0.5), (0.5, 0.5)], [1.0, 1.0, 1.0],
                             [[0, 1], [1, 2], [2]])
        value, chosen = alg_opt_set(inst)
        assert value == pytest.approx(3.0)
        assert chosen in (frozenset({0, 1}), frozenset({0, 2}))

    def test_size_limit(self):
        inst = make_instance(*[(0.1, 0.5, 1.0)] * 5)
        with pytest.raises(OracleSizeLimitError):
            alg_opt(inst, limit=4)

    def test_fractional(self):
        assert fractional_knapsack([(4.0, 0.5), (3.0, 0.5), (2.0, 1.0)], 1.5) == pytest.approx(8.0)
        assert fractional_knapsack([(1.0, 0.0)], 0.0) == pytest.approx(1.0)


class TestProbabilityBudget:
    def test_main_form(self):
        tasks = [Task(i, 0.048, 0.1) for i in range(2)]
        report = prob_budget_bound(tasks)
        assert report.value == pytest.approx(0.313333, rel=1e-5)
        assert report.satisfied
        assert report.applicable

    def test_main_form_violated(self):
        tasks = [Task(i, 0.048, 0.1) for i in range(4)]
        assert prob_budget_bound(tasks, MAIN).satisfied is False

    def test_main_form_not_applicable(self):
        report = prob_budget_bound([Task(0, 0.01, 0.5)])
        assert not report.applicable
        assert report.satisfied is None

    def test_companion_form(self):
        one = prob_budget_bound([Task(0, 0.24, 0.5)], COMPANION)
        assert one.value == pytest.approx(1.17668, rel=1e-5)
        assert one.satisfied
        two = prob_budget_bound([Task(0, 0.24, 0.5), Task(1, 0.24, 0.5)], COMPANION)
        assert two.satisfied is False

    def test_empty_set(self):
        report = prob_budget_bound([])
        assert math.isinf(report.value)
        assert report.to_document()['value'] is None

    def test_unknown_form(self):
        with pytest.raises(ValidationError):
            prob_budget_bound([Task(0, 0.048, 0.1)], 'other')


class TestSymmetricEffort:
    def test_upper(self):
        assert symmetric_effort_upper(0.2, 0.095) == pytest.approx(0.9192, abs=1e-4)

    @pytest.mark.parametrize("p, c", [(0.6, 0.29), (0.2, 0.05), (0.2, 0.1), (0.2, 0.2)])
    def test_not_applicable(self, p, c):
        assert math.isinf(symmetric_effort_upper(p, c))

    @pytest.mark.parametrize("p, c, n, level", [
        (0.5, 0.1, 5, 2),
        (0.5, 0.1, 1, 1),
        (0.1, 0.04, 5, 3),
        (0.5, 0.25, 4, 0),
        (0.5, 0.0, 3, 3),
        (0.5, 0.1, 0, 0),
    ])
    def test_stop_level(self, p, c, n, level):
        assert threshold_stop_level(p, c, n) == level

    @pytest.mark.parametrize("p", [0.1, 0.2, 0.3, 0.4, 0.5])
    @pytest.mark.parametrize("c", [0.013, 0.027, 0.041, 0.07])
    def test_stop_level_is_best_response(self, p, c):
        if 2 * c > p:
            pytest.skip("not incentivizable")
        n = 5
        inst = make_instance(*[(c, p, 1.0)] * n)
        br = best_response(inst, ThresholdRule(frozenset(range(n))))
        assert len(br.effort) == threshold_stop_level(p, c, n)

    def test_negative_n(self):
        with pytest.raises(ValidationError):
            threshold_stop_level(0.5, 0.1, -1)


class TestInformation:
    def test_kl_values(self):
        assert kl_stat(PosteriorDistribution.symmetric(0.6)) == pytest.approx(0.22314, abs=1e-5)
        assert math.isinf(kl_stat(PosteriorDistribution.revealing(0.3)))
        assert kl_stat(PosteriorDistribution.uninformative()) == 0.0

    def test_pinsker_cost(self):
        report = pinsker_cost_bound([PosteriorDistribution.symmetric(0.6)], [0.3])
        assert report.value == pytest.approx(0.33402, abs=1e-5)
        assert report.satisfied

    def test_pinsker_vacuous(self):
        report = pinsker_cost_bound([PosteriorDistribution.revealing(0.5)], [10.0])
        assert math.isinf(report.value)
        assert report.satisfied

    def test_pinsker_length_mismatch(self):
        with pytest.raises(ValidationError):
            pinsker_cost_bound([PosteriorDistribution.uninformative()], [])

    def test_size_bound(self):
        assert pinsker_size_bound(0.2, 0.1) == pytest.approx(10.0)
        assert math.isinf(pinsker_size_bound(0.2, 0.0))

    @pytest.mark.parametrize("p", [0.1, 0.5, 1.0])
    def test_info_gain(self, p):
        assert info_gain_single(PosteriorDistribution.revealing(p)) == pytest.approx(p / 2)
        assert info_gain_single(PosteriorDistribution.symmetric(p)) == pytest.approx(p / 2)

    def test_info_gain_uninformative(self):
        assert info_gain_single(PosteriorDistribution.uninformative()) == 0.0

    @pytest.mark.parametrize("atoms", [
        ((0.5, 0.5),),
        ((0.0, 0.5), (0.5, 0.5)),
        ((1.5, 1.0),),
    ])
    def test_implausible_posteriors(self, atoms):
        with pytest.raises(ValidationError):
            PosteriorDistribution(atoms)


class TestTails:
    def test_hoeffding_at_zero(self):
        assert tail_bounds(HOEFFDING, 0.0, ranges=[(0.0, 1.0)] * 3) == 1.0

    def test_hoeffding(self):
        assert tail_bounds(HOEFFDING, 1.0, ranges=[(0.0, 1.0)] * 2) == pytest.approx(math.exp(-1.0))

    def test_bernstein_vanishes(self):
        assert tail_bounds(BERNSTEIN, 1e3, variance_sum=1.0, bound=1.0) < 1e-12

    def test_two_sided_is_capped(self):
        assert tail_bounds(HOEFFDING, 0.0, ranges=[(0.0, 1.0)], two_sided=True) == 1.0

    def test_negative_delta(self):
        with pytest.raises(ValidationError):
            tail_bounds(HOEFFDING, -0.1, ranges=[(0.0, 1.0)])

    def test_unknown_kind(self):
        with pytest.raises(ValidationError):
            tail_bounds('chernoff', 1.0)

    def test_headroom(self):
        failure = budget_headroom_bound()
        assert failure == pytest.approx(0.0417, abs=1e-4)
        assert 1.0 - failure >= 8.0 / 9.0
