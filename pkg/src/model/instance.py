"""
Problem instances

Tasks, valuations and the instance document codec. All types are
frozen; preprocessing returns a new instance with an id map back to
the ids of the document it was loaded from.
"""

import json
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence, Tuple

from ..config.config_loader import DEFAULT_MASS_TOL
from ..utils.errors import ValidationError

logger = logging.getLogger(__name__)

ADDITIVE = 'additive'
COVERAGE = 'coverage'
VALUATION_KINDS = (ADDITIVE, COVERAGE)


@dataclass(frozen=True)
class Task:
    id: int
    cost: float
    prob: float
    value: float = 0.0

    @property
    def ratio(self):
        """p / 2c, infinite for free tasks"""
        return math.inf if self.cost == 0 else self.prob / (2.0 * self.cost)

    def incentivizable(self, tol=DEFAULT_MASS_TOL):
        """Whether 2c <= p, i.e. a budget-1 rule can pay for the effort"""
        return 2.0 * self.cost <= self.prob + tol


@dataclass(frozen=True)
class Valuation:
    kind: str = ADDITIVE
    universe_weights: Tuple[float, ...] = ()
    covers: Tuple[Tuple[int, ...], ...] = ()

    @property
    def is_coverage(self):
        return self.kind == COVERAGE

    def restrict(self, keep: Sequence[int]) -> 'Valuation':
        """Keep the covers of the listed tasks, in that order"""
        if not self.is_coverage:
            return self
        return replace(self, covers=tuple(self.covers[i] for i in keep))


@dataclass(frozen=True)
class Instance:
    tasks: Tuple[Task, ...]
    valuation: Valuation = field(default_factory=Valuation)
    budget: float = 1.0
    id_map: Tuple[int, ...] = ()

    def __post_init__(self):
        if not self.id_map:
            object.__setattr__(self, 'id_map', tuple(range(len(self.tasks))))

    @property
    def n(self):
        return len(self.tasks)

    @property
    def ids(self):
        return range(self.n)

    def original_id(self, i):
        return self.id_map[i]

    def probs(self, ids: Optional[Iterable[int]] = None):
        if ids is None:
            return [t.prob for t in self.tasks]
        return [self.tasks[i].prob for i in ids]

    def cost_of(self, ids: Iterable[int]) -> float:
        return sum(self.tasks[i].cost for i in ids)

    def prob_mass(self, ids: Iterable[int]) -> float:
        return sum(self.tasks[i].prob for i in ids)

    def value(self, ids: Iterable[int]) -> float:
        return valuation_value(self, ids)

    def normalized(self) -> 'Instance':
        """Same instance with costs and budget divided by the budget"""
        if self.budget == 1.0:
            return self
        tasks = tuple(replace(t, cost=t.cost / self.budget) for t in self.tasks)
        return replace(self, tasks=tasks, budget=1.0)


def valuation_value(inst: Instance, ids: Iterable[int]) -> float:
    """
    Principal value of a task set.

    Additive: sum of task values. Coverage: total weight of the union
    of the covered universe elements.
    """
    ids = list(ids)
    for i in ids:
        if not isinstance(i, int) or i < 0 or i >= inst.n:
            raise ValidationError(f"unknown task id {i}")

    if not inst.valuation.is_coverage:
        return float(sum(inst.tasks[i].value for i in set(ids)))

    covered = set()
    for i in ids:
        covered.update(inst.valuation.covers[i])
    weights = inst.valuation.universe_weights
    return float(sum(weights[e] for e in covered))


def marginal_value(inst: Instance, base: Iterable[int], task: int) -> float:
    base = set(base)
    if task in base:
        return 0.0
    return valuation_value(inst, base | {task}) - valuation_value(inst, base)


def preprocess(inst: Instance, tol=DEFAULT_MASS_TOL) -> Instance:
    """
    Drop tasks that no budget-1 scoring rule can incentivize (2c > p).

    Kept tasks are re-indexed 0..m-1 in their original order and the
    id map is composed so ``original_id`` still refers to the loaded
    document.
    """
    keep = [t.id for t in inst.tasks if t.incentivizable(tol)]
    if len(keep) == inst.n:
        return inst

    dropped = [inst.original_id(i) for i in inst.ids if i not in set(keep)]
    logger.info(f"Preprocessing dropped {len(dropped)} of {inst.n} tasks with 2c > p: {dropped}")

    tasks = tuple(replace(inst.tasks[old], id=new) for new, old in enumerate(keep))
    return Instance(
        tasks=tasks,
        valuation=inst.valuation.restrict(keep),
        budget=inst.budget,
        id_map=tuple(inst.id_map[old] for old in keep),
    )


def _number(value, where, allow_bool=False):
    if isinstance(value, bool) and not allow_bool:
        raise ValidationError(f"{where}: expected a number, got {value!r}")
    if not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ValidationError(f"{where}: expected a finite number, got {value!r}")
    return float(value)


def instance_from_document(doc) -> Instance:
    """Validate an already-parsed instance document"""
    if not isinstance(doc, dict):
        raise ValidationError("instance document must be a JSON object")

    budget = _number(doc.get('budget', 1.0), 'budget')
    if budget <= 0:
        raise ValidationError(f"budget must be positive, got {budget}")

    raw_tasks = doc.get('tasks')
    if not isinstance(raw_tasks, list):
        raise ValidationError("'tasks' must be a list")

    tasks = []
    for pos, raw in enumerate(raw_tasks):
        if not isinstance(raw, dict):
            raise ValidationError(f"task #{pos} must be an object")
        task_id = raw.get('id', pos)
        if isinstance(task_id, bool) or not isinstance(task_id, int):
            raise ValidationError(f"task #{pos}: id must be an integer")
        cost = _number(raw.get('cost'), f"task {task_id} cost")
        prob = _number(raw.get('prob'), f"task {task_id} prob")
        value = _number(raw.get('value', 0.0), f"task {task_id} value")
        if not 0.0 < prob <= 1.0:
            raise ValidationError(f"task {task_id}: prob out of range (0, 1]: {prob}")
        if cost < 0:
            raise ValidationError(f"task {task_id}: cost must be nonnegative: {cost}")
        if value < 0:
            raise ValidationError(f"task {task_id}: value must be nonnegative: {value}")
        tasks.append(Task(task_id, cost, prob, value))

    tasks.sort(key=lambda t: t.id)
    if [t.id for t in tasks] != list(range(len(tasks))):
        raise ValidationError("task ids must be 0..n-1 with no gaps or duplicates")

    valuation = _valuation_from_document(doc.get('valuation', {'kind': ADDITIVE}), len(tasks))
    return Instance(tasks=tuple(tasks), valuation=valuation, budget=budget)


def _valuation_from_document(raw, n) -> Valuation:
    if not isinstance(raw, dict) or raw.get('kind') not in VALUATION_KINDS:
        raise ValidationError(f"valuation kind must be one of {VALUATION_KINDS}")
    if raw['kind'] == ADDITIVE:
        return Valuation()

    weights = raw.get('universe_weights')
    covers = raw.get('covers')
    if not isinstance(weights, list) or not isinstance(covers, list):
        raise ValidationError("coverage valuation needs 'universe_weights' and 'covers' lists")
    weights = tuple(_number(w, 'universe weight') for w in weights)
    if any(w < 0 for w in weights):
        raise ValidationError("universe weights must be nonnegative")
    if len(covers) != n:
        raise ValidationError(f"'covers' has {len(covers)} entries for {n} tasks")

    parsed = []
    for i, cover in enumerate(covers):
        if not isinstance(cover, list):
            raise ValidationError(f"cover of task {i} must be a list")
        for e in cover:
            if isinstance(e, bool) or not isinstance(e, int) or not 0 <= e < len(weights):
                raise ValidationError(f"cover of task {i}: bad universe index {e!r}")
        parsed.append(tuple(sorted(set(cover))))

    return Valuation(kind=COVERAGE, universe_weights=weights, covers=tuple(parsed))


def load_instance(text: str) -> Instance:
    """Parse and validate an instance document"""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValidationError(f"instance document is not valid JSON: {e}") from e
    inst = instance_from_document(doc)
    logger.debug(f"Loaded instance with {inst.n} tasks ({inst.valuation.kind})")
    return inst


def instance_to_document(inst: Instance) -> dict:
    doc = {
        'budget': inst.budget,
        'tasks': [
            {'id': t.id, 'cost': t.cost, 'prob': t.prob, 'value': t.value}
            for t in inst.tasks
        ],
    }
    if inst.valuation.is_coverage:
        doc['valuation'] = {
            'kind': COVERAGE,
            'universe_weights': list(inst.valuation.universe_weights),
            'covers': [list(c) for c in inst.valuation.covers],
        }
    else:
        doc['valuation'] = {'kind': ADDITIVE}
    return doc
