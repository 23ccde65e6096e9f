"""
Signal and outcome spaces

Signal profiles are tuples of Trit, outcomes are tuples of 0/1 bits.
Both are indexed in mixed radix with task 0 as the most significant
digit (base 3 for signals in the order BOT < ZERO < ONE, base 2 for
outcomes). A flat (signal, outcome) table index is
``signal_index * 2**n + outcome_index``.
"""

import itertools
import logging
from enum import IntEnum
from typing import FrozenSet, Iterator, List, NamedTuple, Sequence, Tuple

from ..utils.errors import ValidationError

logger = logging.getLogger(__name__)


class Trit(IntEnum):
    """One reported or received signal"""
    BOT = 0
    ZERO = 1
    ONE = 2

    @classmethod
    def from_bit(cls, bit):
        return cls.ONE if bit else cls.ZERO

    def to_bit(self):
        """The state this signal asserts, or None for BOT"""
        if self is Trit.BOT:
            return None
        return 1 if self is Trit.ONE else 0

    def flipped(self):
        if self is Trit.BOT:
            return self
        return Trit.ZERO if self is Trit.ONE else Trit.ONE

    def __str__(self):
        return {Trit.BOT: '⊥', Trit.ZERO: '0', Trit.ONE: '1'}[self]


SignalProfile = Tuple[Trit, ...]
Outcome = Tuple[int, ...]


class EffortBranch(NamedTuple):
    """One branch of an effort set: which tasks turned out informative"""
    informative: FrozenSet[int]
    probability: float

    def profile(self, outcome: Sequence[int]) -> SignalProfile:
        """Materialize the received signal profile for a given state vector"""
        return tuple(
            Trit.from_bit(outcome[i]) if i in self.informative else Trit.BOT
            for i in range(len(outcome))
        )


def enumerate_effort_outcomes(inst, effort) -> List[EffortBranch]:
    """
    Enumerate which effort tasks reveal their state.

    Each task in ``effort`` is independently informative with probability
    p_i. Branches are listed with the lowest task id as the outermost
    loop and "informative" before "bot" at every level, so for
    p = (0.5, 0.1) the probabilities come out 0.05, 0.45, 0.05, 0.45.
    """
    ids = sorted(effort)
    for i in ids:
        if i < 0 or i >= inst.n:
            raise ValidationError(f"unknown task id {i}")

    branches = []
    for flags in itertools.product((True, False), repeat=len(ids)):
        prob = 1.0
        informative = []
        for task_id, revealed in zip(ids, flags):
            p = inst.tasks[task_id].prob
            if revealed:
                prob *= p
                informative.append(task_id)
            else:
                prob *= 1.0 - p
        branches.append(EffortBranch(frozenset(informative), prob))
    return branches


def signal_index(sigma: Sequence[int]) -> int:
    index = 0
    for trit in sigma:
        index = index * 3 + int(trit)
    return index


def outcome_index(omega: Sequence[int]) -> int:
    index = 0
    for bit in omega:
        index = index * 2 + int(bit)
    return index


def signal_from_index(index: int, n: int) -> SignalProfile:
    digits = []
    for _ in range(n):
        index, digit = divmod(index, 3)
        digits.append(Trit(digit))
    return tuple(reversed(digits))


def outcome_from_index(index: int, n: int) -> Outcome:
    return tuple((index >> (n - 1 - i)) & 1 for i in range(n))


def iter_signal_profiles(n: int) -> Iterator[SignalProfile]:
    """All 3^n profiles in index order"""
    return itertools.product(tuple(Trit), repeat=n)


def iter_outcomes(n: int) -> Iterator[Outcome]:
    """All 2^n outcomes in index order"""
    return itertools.product((0, 1), repeat=n)
