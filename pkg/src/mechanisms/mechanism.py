"""
Mechanisms: a scoring rule together with the recommended task set.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import FrozenSet, Optional, Sequence, Tuple

from ..scoring import TabularRule, rule_from_document, rule_to_document
from ..utils.errors import ValidationError

logger = logging.getLogger(__name__)

# case labels of the static and sequential partitions
CASE_X = 'X'
CASE_Y1 = 'Y1'
CASE_Y2 = 'Y2'
CASE_Y3 = 'Y3'
CASE_Y1_SEQ = 'Y1seq'
CASE_Y2_SEQ = 'Y2seq'
CASE_EMPTY = 'empty'

STATIC_CASES = (CASE_X, CASE_Y1, CASE_Y2, CASE_Y3)
SEQUENTIAL_CASES = (CASE_X, CASE_Y1_SEQ, CASE_Y2_SEQ)

# how a mechanism was checked before being emitted
VERIFIED_IC = 'verify_ic'
VERIFIED_SEQUENTIAL = 'verify_sequential'
VERIFIED_ANALYTIC = 'analytic'
UNVERIFIED = 'none'


@dataclass(frozen=True)
class Provenance:
    procedure: str
    case: Optional[str] = None
    notes: Tuple[str, ...] = ()
    verification: str = UNVERIFIED

    def with_note(self, note):
        return replace(self, notes=self.notes + (note,))

    def verified(self, how):
        return replace(self, verification=how)

    def to_document(self):
        return {
            'procedure': self.procedure,
            'case': self.case,
            'notes': list(self.notes),
            'verification': self.verification,
        }


@dataclass(frozen=True)
class Mechanism:
    rule: object
    recommendation: FrozenSet[int]
    provenance: Provenance = field(default_factory=lambda: Provenance('manual'))

    def __post_init__(self):
        object.__setattr__(self, 'recommendation', frozenset(self.recommendation))

    def value(self, inst) -> float:
        """Principal value of the recommended set"""
        return inst.value(self.recommendation)

    def scaled(self, factor):
        return replace(self, rule=self.rule.scaled(factor))

    def relabel(self, id_map: Sequence[int]) -> 'Mechanism':
        """Rename task ids through id_map (position -> new id)"""
        if list(id_map) == list(range(len(id_map))):
            return self
        if isinstance(self.rule, TabularRule):
            raise ValidationError("tabular rules are indexed by position and cannot be relabeled")
        mapping = dict(enumerate(id_map))
        return replace(self,
                       rule=self.rule.relabel(mapping),
                       recommendation=frozenset(mapping[i] for i in self.recommendation))


def mechanism_to_document(mech: Mechanism, id_map: Optional[Sequence[int]] = None) -> dict:
    if id_map is not None:
        mech = mech.relabel(id_map)
    return {
        'rule': rule_to_document(mech.rule),
        'recommendation': sorted(mech.recommendation),
        'provenance': mech.provenance.to_document(),
    }


def mechanism_from_document(doc) -> Mechanism:
    if not isinstance(doc, dict):
        raise ValidationError("mechanism document must be a JSON object")
    if 'rule' not in doc or 'recommendation' not in doc:
        raise ValidationError("mechanism document needs 'rule' and 'recommendation'")

    recommendation = doc['recommendation']
    if not isinstance(recommendation, list) or any(
            isinstance(i, bool) or not isinstance(i, int) for i in recommendation):
        raise ValidationError("'recommendation' must be a list of task ids")

    raw = doc.get('provenance') or {}
    provenance = Provenance(
        procedure=str(raw.get('procedure', 'manual')),
        case=raw.get('case'),
        notes=tuple(str(n) for n in raw.get('notes', ())),
        verification=str(raw.get('verification', UNVERIFIED)),
    )
    return Mechanism(rule_from_document(doc['rule']), frozenset(recommendation), provenance)
