"""
Subset-sum reduction

Maps an integer subset-sum instance to a knapsack scoring instance
whose optimal value reaches Z + 2kn * v_bar exactly when some subset
sums to Z. All reduction quantities stay integers; the unit-budget
instance is a separate floating view.
"""

import logging
from dataclasses import dataclass, field
from typing import FrozenSet, Iterable, Optional, Tuple

from ..agent import verify_ic
from ..mechanisms import Mechanism, Provenance
from ..model import Instance, Task
from ..scoring import ThresholdRule
from ..utils.errors import ValidationError

logger = logging.getLogger(__name__)

BRUTE_FORCE_LIMIT = 14


@dataclass(frozen=True)
class SubsetSumInstance:
    z: Tuple[int, ...]
    Z: int

    def __post_init__(self):
        object.__setattr__(self, 'z', tuple(self.z))
        if not self.z:
            raise ValidationError("subset sum needs at least one integer")
        for value in self.z + (self.Z,):
            if isinstance(value, bool) or not isinstance(value, int) or value <= 0:
                raise ValidationError(f"subset sum entries must be positive integers, got {value!r}")
        if self.Z <= max(self.z):
            raise ValidationError(f"target Z={self.Z} must exceed max z={max(self.z)}")

    @property
    def n(self):
        return len(self.z)

    @classmethod
    def from_document(cls, doc):
        if not isinstance(doc, dict) or 'z' not in doc or 'Z' not in doc:
            raise ValidationError("subset sum document needs 'z' and 'Z'")
        if not isinstance(doc['z'], list):
            raise ValidationError("'z' must be a list of integers")
        return cls(tuple(doc['z']), doc['Z'])

    def to_document(self):
        return {'z': list(self.z), 'Z': self.Z}


@dataclass(frozen=True)
class ReducedInstance:
    source: SubsetSumInstance
    k: int
    v_bar: int
    c_bar: int
    raw_budget: int
    values: Tuple[int, ...]
    costs: Tuple[int, ...]
    raw: Instance = field(repr=False)
    normalized: Instance = field(repr=False)

    @property
    def n_tasks(self):
        return len(self.values)

    @property
    def fillers(self) -> FrozenSet[int]:
        return frozenset(range(self.source.n, self.n_tasks))

    def to_document(self):
        return {
            'subset_sum': self.source.to_document(),
            'k': self.k,
            'v_bar': self.v_bar,
            'c_bar': self.c_bar,
            'raw_budget': self.raw_budget,
            'n_tasks': self.n_tasks,
        }


def _min_k(ss: SubsetSumInstance, c_bar: int) -> int:
    k = 1
    while 2 ** (k * ss.n) <= ss.Z + 2 * k * ss.n * c_bar + 1:
        k += 1
    return k


def reduce_subset_sum(ss: SubsetSumInstance) -> ReducedInstance:
    """
    (2k+1)n tasks revealing their state with probability 1: the first
    n have value and cost z_i, the other 2kn have value 1 + sum z and
    cost 1 + max z. The budget is Z + 2kn * c_bar + 1.
    """
    n = ss.n
    v_bar = 1 + sum(ss.z)
    c_bar = 1 + max(ss.z)
    k = _min_k(ss, c_bar)
    raw_budget = ss.Z + 2 * k * n * c_bar + 1

    values = tuple(ss.z) + (v_bar,) * (2 * k * n)
    costs = tuple(ss.z) + (c_bar,) * (2 * k * n)
    raw = Instance(
        tasks=tuple(Task(i, float(c), 1.0, float(v)) for i, (c, v) in enumerate(zip(costs, values))),
        budget=float(raw_budget),
    )
    logger.info(f"Reduced subset sum with n={n}, Z={ss.Z}: k={k}, {len(values)} tasks, budget {raw_budget}")
    return ReducedInstance(ss, k, v_bar, c_bar, raw_budget, values, costs, raw, raw.normalized())


@dataclass(frozen=True)
class CertificateReport:
    valid: bool
    subset_sum: int
    agent_utility: int
    principal_value: int
    small_deviation_ok: bool
    mid_deviation_ok: bool
    notes: Tuple[str, ...] = ()

    def to_document(self):
        return {
            'valid': self.valid,
            'subset_sum': self.subset_sum,
            'agent_utility': self.agent_utility,
            'principal_value': self.principal_value,
            'small_deviation_ok': self.small_deviation_ok,
            'mid_deviation_ok': self.mid_deviation_ok,
            'notes': list(self.notes),
        }


def _subset(red: ReducedInstance, subset: Iterable[int]) -> FrozenSet[int]:
    subset = frozenset(subset)
    for i in subset:
        if isinstance(i, bool) or not isinstance(i, int) or not 0 <= i < red.source.n:
            raise ValidationError(f"subset index {i!r} outside 0..{red.source.n - 1}")
    return subset


def certificate_check(red: ReducedInstance, subset: Iterable[int]) -> CertificateReport:
    """
    Check a subset-sum certificate against the reduced instance.

    The recommendation is the subset plus every filler task. Full effort
    must leave the agent utility exactly 1; guessing on kn or more tasks
    must pay below 1 (2^kn > budget); and every deviation of middling
    size must cost at least half the budget (2(Z + kn * c_bar) >= budget).
    """
    subset = _subset(red, subset)
    ss = red.source
    kn = red.k * ss.n
    total = sum(ss.z[i] for i in subset)

    psi = subset | red.fillers
    agent_utility = red.raw_budget - sum(red.costs[i] for i in psi)
    principal_value = sum(red.values[i] for i in psi)
    small_ok = 2 ** kn > red.raw_budget
    mid_ok = 2 * (ss.Z + kn * red.c_bar) >= red.raw_budget

    notes = []
    if total != ss.Z:
        notes.append(f"subset sums to {total}, not {ss.Z}")
    if agent_utility != 1:
        notes.append(f"full-effort utility is {agent_utility}, not 1")
    valid = total == ss.Z and agent_utility == 1 and small_ok and mid_ok
    logger.debug(f"Certificate {sorted(subset)}: valid={valid}, value={principal_value}")
    return CertificateReport(valid, total, agent_utility, principal_value, small_ok, mid_ok, tuple(notes))


def threshold_certificate_mechanism(red: ReducedInstance, subset: Iterable[int],
                                    brute_force_limit=BRUTE_FORCE_LIMIT) -> Tuple[Mechanism, Optional[object]]:
    """
    The all-correct threshold rule over subset plus fillers, paying the
    raw budget, on the raw instance. Its IC report is computed by brute
    force when the instance is small enough, otherwise None.
    """
    psi = _subset(red, subset) | red.fillers
    rule = ThresholdRule(psi, threshold=len(psi), cap=float(red.raw_budget))
    mech = Mechanism(rule, psi, Provenance('subset_sum_certificate', notes=(f"threshold {len(psi)}",)))
    if red.n_tasks > brute_force_limit:
        return mech, None
    report = verify_ic(red.raw, mech, structured_limit=brute_force_limit)
    logger.info(f"Certificate mechanism IC check: holds={report.holds}, gap={report.gap:.3g}")
    return mech, report
