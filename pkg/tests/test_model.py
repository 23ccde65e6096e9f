import json

import pytest
from hypothesis import given, strategies as st

from conftest import make_coverage, make_instance
from src.model import (
    Instance,
    Task,
    Trit,
    enumerate_effort_outcomes,
    instance_from_document,
    instance_to_document,
    load_instance,
    marginal_value,
    outcome_from_index,
    outcome_index,
    preprocess,
    signal_from_index,
    signal_index,
    valuation_value,
)
from src.utils.errors import ValidationError


def _doc(*tasks, **extra):
    doc = {'tasks': [{'cost': c, 'prob': p, 'value': v} for c, p, v in tasks]}
    doc.update(extra)
    return json.dumps(doc)


class TestLoadInstance:
    def test_single_task(self):
        inst = load_instance(_doc((0.1, 0.5, 1.0)))
        assert inst.n == 1
        assert inst.tasks[0] == Task(0, 0.1, 0.5, 1.0)
        assert inst.budget == 1.0

    def test_prob_out_of_range(self):
        with pytest.raises(ValidationError, match="prob out of range"):
            load_instance(_doc((0.1, 1.2, 1.0)))

    @pytest.mark.parametrize("field, value", [('cost', -0.1), ('value', -1.0), ('prob', 0.0), ('prob', True)])
    def test_bad_fields(self, field, value):
        task = {'cost': 0.1, 'prob': 0.5, 'value': 1.0}
        task[field] = value
        with pytest.raises(ValidationError):
            instance_from_document({'tasks': [task]})

    def test_not_json(self):
        with pytest.raises(ValidationError, match="not valid JSON"):
            load_instance("{tasks:")

    def test_nonpositive_budget(self):
        with pytest.raises(ValidationError, match="budget"):
            load_instance(_doc((0.1, 0.5, 1.0), budget=0))

    def test_duplicate_ids(self):
        doc = {'tasks': [{'id': 0, 'cost': 0.1, 'prob': 0.5}, {'id': 0, 'cost': 0.1, 'prob': 0.5}]}
        with pytest.raises(ValidationError, match="task ids"):
            instance_from_document(doc)

    def test_coverage(self):
        doc = {
            'tasks': [{'cost': 0.1, 'prob': 0.5}, {'cost': 0.1, 'prob': 0.5}],
            'valuation': {'kind': 'coverage', 'universe_weights': [2, 3], 'covers': [[0], [0, 1]]},
        }
        inst = instance_from_document(doc)
        assert inst.value([1]) == 5.0
        assert inst.value([0]) == 2.0

    def test_coverage_bad_index(self):
        doc = {
            'tasks': [{'cost': 0.1, 'prob': 0.5}],
            'valuation': {'kind': 'coverage', 'universe_weights': [2], 'covers': [[3]]},
        }
        with pytest.raises(ValidationError, match="universe index"):
            instance_from_document(doc)

    def test_document_is_inverse(self):
        inst = make_coverage([(0.1, 0.5), (0.2, 0.9)], [1.0, 2.0, 4.0], [[0, 2], [1]], budget=2.0)
        assert instance_from_document(instance_to_document(inst)) == inst


class TestPreprocess:
    def test_drops_tasks_above_budget(self):
        inst = make_instance((0.1, 0.5, 1.0), (0.3, 0.5, 1.0))
        reduced = preprocess(inst)
        assert reduced.n == 1
        assert reduced.id_map == (0,)

    def test_id_map_skips_dropped(self):
        inst = make_instance((0.1, 0.5, 1.0), (0.3, 0.5, 2.0), (0.2, 0.6, 3.0))
        reduced = preprocess(inst)
        assert reduced.id_map == (0, 2)
        assert [t.id for t in reduced.tasks] == [0, 1]
        assert reduced.original_id(1) == 2
        assert reduced.tasks[1].value == 3.0

    def test_identity(self, pair_half):
        assert preprocess(pair_half) is pair_half

    def test_empty(self):
        assert preprocess(Instance(tasks=())).n == 0

    def test_restricts_coverage(self):
        inst = make_coverage([(0.3, 0.5), (0.1, 0.5)], [1.0, 2.0], [[0], [1]])
        reduced = preprocess(inst)
        assert reduced.valuation.covers == ((1,),)
        assert reduced.value([0]) == 2.0

    def test_normalized_budget(self):
        inst = make_instance((0.5, 0.5, 1.0), budget=2.0)
        norm = inst.normalized()
        assert norm.budget == 1.0
        assert norm.tasks[0].cost == 0.25


class TestValuation:
    def test_additive(self):
        inst = make_instance((0.1, 0.5, 6.0), (0.1, 0.5, 10.0), (0.1, 0.5, 12.0))
        assert inst.value([0, 2]) == 18.0
        assert inst.value([]) == 0.0
        assert valuation_value(inst, [0, 2]) == 18.0

    def test_coverage_union(self):
        inst = make_coverage([(0.1, 0.5), (0.1, 0.5)], [2.0, 3.0], [[0], [0, 1]])
        assert inst.value([0, 1]) == 5.0
        assert marginal_value(inst, [1], 0) == 0.0
        assert marginal_value(inst, [0], 1) == 3.0

    def test_unknown_id(self, single_task):
        with pytest.raises(ValidationError, match="unknown task id"):
            single_task.value([3])

    @given(st.lists(st.integers(0, 3), max_size=4), st.lists(st.integers(0, 3), max_size=4))
    def test_coverage_is_monotone_and_submodular(self, a, b):
        inst = make_coverage([(0.1, 0.5)] * 4, [1.0, 2.0, 3.0], [[0], [0, 1], [2], [1, 2]])
        small = set(a)
        large = small | set(b)
        assert inst.value(small) <= inst.value(large) + 1e-12
        for task in range(4):
            if task not in large:
                assert marginal_value(inst, small, task) >= marginal_value(inst, large, task) - 1e-12


class TestSignals:
    def test_empty_effort(self, pair_half):
        branches = enumerate_effort_outcomes(pair_half, [])
        assert len(branches) == 1
        assert branches[0].informative == frozenset()
        assert branches[0].probability == 1.0

    def test_single_effort(self, single_task):
        branches = enumerate_effort_outcomes(single_task, [0])
        assert [b.probability for b in branches] == [0.5, 0.5]
        assert branches[0].informative == frozenset({0})

    def test_branch_order(self):
        inst = make_instance((0.1, 0.5, 1.0), (0.01, 0.1, 1.0))
        probs = [b.probability for b in enumerate_effort_outcomes(inst, [0, 1])]
        assert probs == pytest.approx([0.05, 0.45, 0.05, 0.45])

    def test_branch_profile(self):
        inst = make_instance((0.1, 0.5, 1.0), (0.1, 0.5, 1.0))
        branch = enumerate_effort_outcomes(inst, [0, 1])[1]
        assert branch.profile((1, 0)) == (Trit.ONE, Trit.BOT)

    @given(st.lists(st.floats(0.01, 1.0), min_size=1, max_size=5))
    def test_branch_probabilities_sum_to_one(self, probs):
        inst = make_instance(*[(0.0, p, 1.0) for p in probs])
        total = sum(b.probability for b in enumerate_effort_outcomes(inst, inst.ids))
        assert total == pytest.approx(1.0)

    def test_mixed_radix(self):
        assert signal_index((Trit.BOT, Trit.BOT)) == 0
        assert signal_index((Trit.ZERO, Trit.ONE)) == 5
        assert signal_index((Trit.ONE, Trit.ONE)) == 8
        assert signal_from_index(5, 2) == (Trit.ZERO, Trit.ONE)
        assert outcome_index((1, 0)) == 2
        assert outcome_from_index(2, 2) == (1, 0)

    def test_trit_helpers(self):
        assert Trit.BOT < Trit.ZERO < Trit.ONE
        assert Trit.from_bit(1) is Trit.ONE
        assert Trit.BOT.to_bit() is None
        assert Trit.ZERO.flipped() is Trit.ONE
