import json

import pytest
from hypothesis import given, strategies as st

from conftest import make_coverage, make_instance
from src.agent import verify_ic
from src.bench import gen
from src.bounds import alg_opt
from src.mechanisms import (
    CASE_EMPTY,
    CASE_X,
    CASE_Y1,
    CASE_Y1_SEQ,
    CASE_Y2,
    CASE_Y2_SEQ,
    CASE_Y3,
    PROB,
    VERIFIED_IC,
    VERIFIED_SEQUENTIAL,
    CaseComponent,
    Mechanism,
    MechanismPipeline,
    Provenance,
    analytic_check,
    best_of_sequential,
    best_of_static,
    build_truncated_mechanism,
    empty_mechanism,
    knapsack_greedy,
    mechanism_from_document,
    mechanism_to_document,
    partition_sequential,
    partition_static,
    recommend_threshold_sequential,
    recommend_threshold_static,
    recommend_truncated,
    save_results,
    submodular_greedy,
    threshold_condition,
    threshold_key,
)
from src.model import Instance, Task, preprocess
from src.optlp import ic_opt_exact
from src.scoring import ThresholdRule, TruncatedSeparateRule, to_tabular
from src.utils.errors import ValidationError


class TestGreedy:
    def test_value_per_cost(self):
        tasks = [Task(i, 0.5, 1.0, v) for i, v in enumerate((4.0, 3.0, 2.0, 1.0))]
        chosen, bound = knapsack_greedy(tasks, 1.5)
        assert chosen == frozenset({0, 1, 2})
        assert bound == pytest.approx(9.0)

    def test_stops_at_first_misfit(self):
        tasks = [Task(0, 0.2, 1.0, 3.0), Task(1, 1.0, 1.0, 10.0), Task(2, 0.1, 1.0, 1.0)]
        chosen, bound = knapsack_greedy(tasks, 1.0)
        assert chosen == frozenset({0})
        assert bound == pytest.approx(11.0)

    def test_probability_weight(self):
        tasks = [Task(0, 0.0, 0.5, 1.0), Task(1, 0.0, 0.1, 1.0), Task(2, 0.0, 0.3, 0.3)]
        chosen, _ = knapsack_greedy(tasks, 0.55, weight=PROB)
        assert chosen == frozenset({1})

    def test_bad_weight(self):
        with pytest.raises(ValidationError):
            knapsack_greedy([Task(0, 0.1, 0.5, 1.0)], 1.0, weight='value')

    def test_singleton_fallback(self):
        inst = make_coverage([(0.1, 0.5), (1.0, 0.5)], [1.0, 5.0], [[0], [1]])
        assert submodular_greedy(inst, 1.0) == frozenset({1})

    def test_coverage_stops_without_gain(self):
        inst = make_coverage([(0.3, 0.5), (0.3, 0.5)], [2.0, 3.0], [[0], [0, 1]])
        assert submodular_greedy(inst, 1.0) == frozenset({1})

    def test_additive_rejected(self, pair_half):
        with pytest.raises(ValidationError, match="additive"):
            submodular_greedy(pair_half, 1.0)

    def test_truncated_recommendation(self):
        inst = make_instance((0.1, 0.5, 1.0), (0.05, 0.5, 2.0), (0.2, 0.5, 1.0))
        assert recommend_truncated(inst, budget=0.16) == frozenset({0, 1})
        assert recommend_truncated(inst, ground={0, 2}, budget=0.16) == frozenset({0})


class TestPartitions:
    @pytest.fixture
    def mixed(self):
        return make_instance(
            (0.01, 0.5, 1.0),   # p/2c = 25
            (0.1, 0.5, 1.0),    # 2.5
            (0.2, 0.4, 1.0),    # 1.0, p >= 1/4
            (0.05, 0.1, 1.0),   # 1.0, p < 1/4
            (0.3, 0.5, 1.0),    # 2c > p
            (0.02, 0.05, 1.0),  # 1.25, p < 0.1
        )

    def test_static(self, mixed):
        cases = partition_static(mixed)
        assert cases == {
            CASE_X: frozenset({0}),
            CASE_Y3: frozenset({1, 5}),
            CASE_Y1: frozenset({2}),
            CASE_Y2: frozenset({3}),
        }

    def test_sequential(self, mixed):
        cases = partition_sequential(mixed)
        assert cases == {
            CASE_X: frozenset({0}),
            CASE_Y1_SEQ: frozenset({1, 2, 3}),
            CASE_Y2_SEQ: frozenset({5}),
        }

    def test_uses_normalized_costs(self):
        inst = make_instance((0.2, 0.5, 1.0), budget=10.0)
        assert partition_static(inst)[CASE_X] == frozenset({0})


class TestThresholdRecommendation:
    def test_key(self):
        assert threshold_key(Task(0, 0.1, 0.5)) == pytest.approx(1.1)

    def test_pair_passes(self, pair_half):
        assert threshold_condition(pair_half, {0, 1})
        assert recommend_threshold_static(pair_half) == frozenset({0, 1})

    def test_costly_pair_falls_back_to_best_task(self):
        inst = make_instance((0.2, 0.5, 1.0), (0.2, 0.5, 2.0))
        assert not threshold_condition(inst, {0, 1})
        assert recommend_threshold_static(inst) == frozenset({1})

    def test_empty_ground(self, pair_half):
        assert recommend_threshold_static(pair_half, ground=()) == frozenset()
        assert recommend_threshold_sequential(pair_half, ground=()) == frozenset()

    @given(st.lists(st.tuples(st.floats(0.01, 1.0), st.floats(0.0, 1.0), st.floats(0.0, 5.0)),
                    min_size=1, max_size=6))
    def test_recommendation_meets_condition(self, draws):
        inst = make_instance(*[(p / 2.0 * u, p, v) for p, u, v in draws])
        psi = recommend_threshold_static(inst)
        assert threshold_condition(inst, psi)

    def test_sequential_probability_budget(self):
        inst = make_instance(*[(0.04, 0.09, 1.0)] * 7)
        assert recommend_threshold_sequential(inst) == frozenset(range(6))


class TestTruncatedMechanism:
    def test_cap_one(self, x_tasks):
        mech = build_truncated_mechanism(x_tasks, cap=1.0, case=CASE_X)
        assert mech.recommendation == frozenset({0, 1, 2})
        assert mech.rule.cap == 1.0
        assert mech.rule.per_task[0].score_bot == pytest.approx(0.0140625)
        assert mech.rule.base_score() == pytest.approx(0.5)
        assert verify_ic(x_tasks, mech).holds

    def test_cost_budget_scales_with_cap(self):
        inst = make_instance(*[(0.05, 1.0, 1.0)] * 4)
        assert len(build_truncated_mechanism(inst, cap=1.0).recommendation) == 2
        assert len(build_truncated_mechanism(inst, cap=11.0).recommendation) == 4

    def test_rescaled_budget(self, x_tasks):
        scaled = Instance(tasks=tuple(Task(t.id, t.cost * 4, t.prob, t.value) for t in x_tasks.tasks), budget=4.0)
        mech = build_truncated_mechanism(scaled, cap=1.0)
        assert mech.rule.cap == pytest.approx(4.0)
        assert verify_ic(scaled, mech).holds

    def test_empty_mechanism(self, pair_half):
        mech = empty_mechanism(pair_half)
        assert mech.recommendation == frozenset()
        assert mech.provenance.case == CASE_EMPTY
        assert isinstance(mech.rule, TruncatedSeparateRule)
        assert mech.rule.base_score() == pytest.approx(0.5)


class TestBestOfStatic:
    def test_all_x(self, x_tasks):
        mech = best_of_static(x_tasks)
        assert mech.provenance.case == CASE_X
        assert mech.recommendation == frozenset({0, 1, 2})
        assert mech.provenance.verification == VERIFIED_IC
        assert mech.value(x_tasks) == pytest.approx(4.5)

    def test_all_y1(self):
        inst = make_instance((0.2, 0.4, 1.0), (0.2, 0.4, 3.0))
        mech = best_of_static(inst)
        assert mech.provenance.case == CASE_Y1
        assert mech.recommendation == frozenset({1})

    def test_nothing_incentivizable(self):
        mech = best_of_static(make_instance((0.3, 0.5, 1.0)))
        assert mech.provenance.case == CASE_EMPTY
        assert mech.recommendation == frozenset()

    @pytest.mark.parametrize("seed", range(6))
    @pytest.mark.parametrize("regime", ['mixed', 'x-heavy', 'y2-heavy'])
    def test_random_instances(self, seed, regime):
        inst = preprocess(gen(seed, 3, regime))
        mech = best_of_static(inst)
        assert verify_ic(inst, mech).holds
        assert mech.value(inst) <= alg_opt(inst) + 1e-9
        assert mech.value(inst) <= ic_opt_exact(inst).value + 1e-6

    def test_coverage_instance(self):
        inst = preprocess(gen(2, 4, 'mixed', valuation='coverage'))
        mech = best_of_static(inst)
        assert verify_ic(inst, mech).holds
        assert mech.value(inst) <= alg_opt(inst) + 1e-9

    @pytest.mark.slow
    def test_two_hundred_instances_up_to_twelve_tasks(self):
        for seed in range(200):
            n = 1 + seed % 12
            inst = preprocess(gen(seed, n, 'mixed'))
            mech = best_of_static(inst)
            report = verify_ic(inst, mech)
            assert report.holds, f"seed {seed}, n={n}: {report.notes}"
            assert mech.value(inst) <= alg_opt(inst) + 1e-9


class TestBestOfSequential:
    def test_rare_tasks(self):
        inst = make_instance(*[(0.04, 0.09, 1.0)] * 4)
        mech = best_of_sequential(inst)
        assert mech.provenance.case == CASE_Y2_SEQ
        assert mech.recommendation == frozenset(range(4))
        assert mech.provenance.verification == VERIFIED_SEQUENTIAL

    def test_single_threshold_task(self):
        inst = make_instance((0.1, 0.5, 1.0), (0.1, 0.4, 2.0))
        mech = best_of_sequential(inst)
        assert mech.provenance.case == CASE_Y1_SEQ
        assert mech.recommendation == frozenset({1})
        assert isinstance(mech.rule, ThresholdRule)
        assert mech.provenance.verification == VERIFIED_IC


class _Broken(CaseComponent):
    def __init__(self, case):
        super().__init__('Broken', case)

    def build_candidate(self, inst, ground, **kwargs):
        raise RuntimeError("no candidate")


class TestPipeline:
    def test_stages(self, x_tasks):
        results = MechanismPipeline.static().run(x_tasks)
        assert results['success']
        assert results['case_sizes'][CASE_X] == 3
        assert set(results['stages']) == {CASE_X, CASE_Y1, CASE_Y2, CASE_Y3}
        assert results['stages'][CASE_Y1]['message'] == 'no tasks in this case'
        assert results['stats']['failed_cases'] == 0

    def test_failing_component_is_recorded(self, x_tasks):
        results = MechanismPipeline(partition_static, [_Broken(CASE_X)]).run(x_tasks)
        assert not results['stages'][CASE_X]['success']
        assert results['stages'][CASE_X]['message'].startswith('Error')
        assert results['mechanism'].provenance.case == CASE_EMPTY
        assert results['stats']['failed_cases'] == 1

    def test_add_component(self, x_tasks):
        pipeline = MechanismPipeline(partition_static)
        pipeline.add_component(_Broken(CASE_Y3))
        assert [c.name for c in pipeline.components] == ['Broken']

    def test_save_results(self, x_tasks, tmp_path):
        results = MechanismPipeline.static().run(x_tasks)
        path = save_results(results, str(tmp_path / 'runs'))
        with open(path) as f:
            saved = json.load(f)
        assert saved['success'] is True
        assert saved['mechanism']['recommendation'] == [0, 1, 2]

    def test_analytic_threshold_check(self, pair_half):
        holds, _ = analytic_check(pair_half, Mechanism(ThresholdRule({0, 1}), {0, 1}))
        assert holds
        costly = make_instance((0.2, 0.5, 1.0), (0.2, 0.5, 1.0))
        holds, _ = analytic_check(costly, Mechanism(ThresholdRule({0, 1}), {0, 1}))
        assert not holds

    def test_analytic_fallback_above_limit(self, x_tasks):
        mech = MechanismPipeline.static(structured_limit=1).run(x_tasks)['mechanism']
        assert mech.provenance.case == CASE_X
        assert mech.provenance.verification == 'analytic'


class TestMechanism:
    def test_relabel(self):
        mech = Mechanism(ThresholdRule({0, 1}), {0, 1}).relabel((3, 5))
        assert mech.recommendation == frozenset({3, 5})
        assert mech.rule.recommendation == frozenset({3, 5})

    def test_relabel_identity(self):
        mech = Mechanism(ThresholdRule({0}), {0})
        assert mech.relabel((0, 1)) is mech

    def test_tabular_cannot_relabel(self):
        mech = Mechanism(to_tabular(ThresholdRule({0}), 1), {0})
        with pytest.raises(ValidationError):
            mech.relabel((2,))

    def test_document_is_inverse(self, x_tasks):
        mech = build_truncated_mechanism(x_tasks, cap=1.0, case=CASE_X)
        assert mechanism_from_document(mechanism_to_document(mech)) == mech

    def test_document_needs_rule(self):
        with pytest.raises(ValidationError):
            mechanism_from_document({'recommendation': [0]})

    def test_provenance_notes(self):
        prov = Provenance('manual').with_note('a').verified(VERIFIED_IC)
        assert prov.notes == ('a',)
        assert prov.to_document()['verification'] == VERIFIED_IC
