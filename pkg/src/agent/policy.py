"""
Agent report policies and oracle result types.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import FrozenSet, Optional, Tuple, Union

from ..model import signal_from_index


class ReportAction(Enum):
    TRUTHFUL = 'truthful'
    GUESS_ON_BOT = 'guess_on_bot'


@dataclass(frozen=True)
class ReportPolicy:
    """Per-task choice between reporting ⊥ and guessing when uninformed"""
    guess_set: FrozenSet[int] = frozenset()

    @classmethod
    def truthful(cls):
        return cls()

    @classmethod
    def guessing(cls, ids):
        return cls(frozenset(ids))

    def action(self, task) -> ReportAction:
        return ReportAction.GUESS_ON_BOT if task in self.guess_set else ReportAction.TRUTHFUL

    def is_truthful(self):
        return not self.guess_set

    def to_document(self):
        return {'kind': 'per_task', 'guess_on_bot': sorted(self.guess_set)}


@dataclass(frozen=True)
class ReportMap:
    """
    A joint reporting map: received profile index -> reported profile index.

    Covers every deterministic misreport, including per-task maps
    from {0, 1, ⊥} to {0, 1, ⊥}.
    """
    n: int
    reports: Tuple[int, ...]

    @classmethod
    def truthful(cls, n):
        return cls(n, tuple(range(3 ** n)))

    def report_for(self, sigma_index: int) -> int:
        return self.reports[sigma_index]

    def is_truthful(self):
        return all(r == s for s, r in enumerate(self.reports))

    def deviations(self):
        """(received, reported) pairs where the map lies"""
        return [(signal_from_index(s, self.n), signal_from_index(r, self.n))
                for s, r in enumerate(self.reports) if r != s]

    def to_document(self):
        return {
            'kind': 'joint_map',
            'deviations': [
                {'received': ''.join(str(t) for t in got), 'reported': ''.join(str(t) for t in sent)}
                for got, sent in self.deviations()
            ],
        }


Policy = Union[ReportPolicy, ReportMap]


@dataclass(frozen=True)
class BestResponse:
    effort: FrozenSet[int]
    policy: Policy
    utility: float
    score: float = 0.0

    def to_document(self, id_map=None):
        effort = sorted(self.effort)
        if id_map is not None:
            effort = sorted(id_map[i] for i in effort)
        return {
            'effort': effort,
            'policy': self.policy.to_document(),
            'utility': self.utility,
            'score': self.score,
        }


@dataclass(frozen=True)
class ICReport:
    holds: bool
    gap: float
    worst_deviation: BestResponse
    recommended_utility: float
    notes: Tuple[str, ...] = field(default_factory=tuple)

    def to_document(self, id_map=None):
        return {
            'holds': self.holds,
            'gap': self.gap,
            'recommended_utility': self.recommended_utility,
            'worst_deviation': self.worst_deviation.to_document(id_map),
            'notes': list(self.notes),
        }
