"""
Case builders

One component per case of the partitions: the truncated mechanism for
tasks with a large p/2c, the best single task, and the threshold
mechanisms over the static and sequential recommendations.
"""

import logging

from ..scoring import ThresholdRule, single_budget_minimal
from .base import CaseComponent
from .greedy import SUBMODULAR_NOTE
from .mechanism import Mechanism, Provenance
from .recommend import (
    build_truncated_mechanism,
    recommend_threshold_sequential,
    recommend_threshold_static,
)

logger = logging.getLogger(__name__)

BUDGET_MINIMAL = 'budget_minimal'
THRESHOLD = 'threshold'


def _candidate(inst, mech, message):
    value = mech.value(inst)
    return {'success': True, 'mechanism': mech, 'value': value, 'message': f"{message}, value {value:.6g}"}


class TruncatedCase(CaseComponent):
    """Truncated separate mechanism at cap 1"""

    def __init__(self, case, cap=1.0):
        super().__init__('TruncatedCase', case)
        self.cap = cap

    def build_candidate(self, inst, ground, **kwargs):
        mech = build_truncated_mechanism(inst, cap=self.cap, ground=ground, case=self.case)
        return _candidate(inst, mech, f"truncated over {len(mech.recommendation)} tasks")


class SingletonCase(CaseComponent):
    """The most valuable single task, paid by its budget-minimal rule or a threshold rule"""

    def __init__(self, case, rule=BUDGET_MINIMAL):
        super().__init__('SingletonCase', case)
        self.rule = rule

    def build_candidate(self, inst, ground, **kwargs):
        best = max(sorted(ground), key=lambda i: (inst.value([i]), -i))
        if self.rule == BUDGET_MINIMAL:
            rule = single_budget_minimal(inst.tasks[best])
        else:
            rule = ThresholdRule(frozenset((best,)), threshold=1, cap=1.0)
        mech = Mechanism(rule, frozenset((best,)), Provenance(f"best_singleton_{self.rule}", self.case))
        return _candidate(inst, mech, f"task {best}")


class ThresholdCase(CaseComponent):
    """Threshold rule with threshold 1 over a recommended set"""

    def __init__(self, case, sequential=False):
        super().__init__('ThresholdCase', case)
        self.sequential = sequential

    def build_candidate(self, inst, ground, **kwargs):
        if self.sequential:
            psi = recommend_threshold_sequential(inst, ground)
            procedure = 'threshold_sequential'
        else:
            psi = recommend_threshold_static(inst, ground)
            procedure = 'threshold_static'
        notes = (SUBMODULAR_NOTE,) if inst.valuation.is_coverage else ()
        mech = Mechanism(ThresholdRule(psi, threshold=1, cap=1.0), psi, Provenance(procedure, self.case, notes))
        return _candidate(inst, mech, f"threshold over {len(psi)} tasks")
