import pytest

from src.hardness import (
    SubsetSumInstance,
    certificate_check,
    reduce_subset_sum,
    threshold_certificate_mechanism,
)
from src.utils.errors import ValidationError


@pytest.fixture
def small_yes():
    """z = (1, 2), Z = 3: the whole set is a certificate"""
    return reduce_subset_sum(SubsetSumInstance((1, 2), 3))


class TestSubsetSumInstance:
    @pytest.mark.parametrize("z, Z", [((), 3), ((1, 0), 3), ((1, 2), 2), ((1, True), 3), ((1.5,), 3)])
    def test_rejects(self, z, Z):
        with pytest.raises(ValidationError):
            SubsetSumInstance(z, Z)

    def test_document(self):
        ss = SubsetSumInstance.from_document({'z': [1, 2], 'Z': 3})
        assert ss.z == (1, 2)
        assert ss.to_document() == {'z': [1, 2], 'Z': 3}

    @pytest.mark.parametrize("doc", [{'z': [1]}, {'z': 1, 'Z': 3}, [1, 2]])
    def test_bad_document(self, doc):
        with pytest.raises(ValidationError):
            SubsetSumInstance.from_document(doc)


class TestReduction:
    def test_quantities(self, small_yes):
        assert small_yes.k == 3
        assert small_yes.v_bar == 4
        assert small_yes.c_bar == 3
        assert small_yes.raw_budget == 40
        assert small_yes.n_tasks == 14
        assert small_yes.fillers == frozenset(range(2, 14))

    def test_single_integer(self):
        red = reduce_subset_sum(SubsetSumInstance((1,), 2))
        assert red.k == 5
        assert red.n_tasks == 11

    def test_k_is_minimal(self, small_yes):
        n, k = 2, small_yes.k
        assert 2 ** (k * n) > small_yes.raw_budget
        assert 2 ** ((k - 1) * n) <= 3 + 2 * (k - 1) * n * small_yes.c_bar + 1

    def test_instances(self, small_yes):
        assert small_yes.raw.budget == 40.0
        assert all(t.prob == 1.0 for t in small_yes.raw.tasks)
        assert small_yes.normalized.budget == 1.0
        assert small_yes.normalized.tasks[0].cost == pytest.approx(1 / 40)

    def test_document(self, small_yes):
        doc = small_yes.to_document()
        assert doc['subset_sum'] == {'z': [1, 2], 'Z': 3}
        assert doc['n_tasks'] == 14


class TestCertificate:
    def test_valid(self, small_yes):
        report = certificate_check(small_yes, [0, 1])
        assert report.valid
        assert report.subset_sum == 3
        assert report.agent_utility == 1
        assert report.principal_value == 51
        assert report.small_deviation_ok
        assert report.mid_deviation_ok
        assert report.notes == ()

    def test_wrong_sum(self, small_yes):
        report = certificate_check(small_yes, [0])
        assert not report.valid
        assert report.agent_utility == 3
        assert len(report.notes) == 2
        assert report.to_document()['valid'] is False

    def test_index_out_of_range(self, small_yes):
        with pytest.raises(ValidationError):
            certificate_check(small_yes, [2])

    def test_large_instance_skips_brute_force(self, small_yes):
        mech, report = threshold_certificate_mechanism(small_yes, [0, 1], brute_force_limit=4)
        assert report is None
        assert mech.recommendation == frozenset(range(14))
        assert mech.rule.threshold == 14
        assert mech.rule.cap == 40.0

    @pytest.mark.slow
    def test_threshold_mechanism_is_ic(self, small_yes):
        mech, report = threshold_certificate_mechanism(small_yes, [0, 1])
        assert report.holds
        assert report.recommended_utility == pytest.approx(1.0)
