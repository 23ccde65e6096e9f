"""
Random instance generation

Each regime draws (p, p/2c) from ranges chosen so that a given case of
the partition is reachable; costs are derived from the drawn ratio and
rounded down, which can only raise p/2c.
"""

import logging
from typing import Optional

import numpy as np

from ..model import ADDITIVE, COVERAGE, Instance, Task, Valuation
from ..utils.errors import ValidationError

logger = logging.getLogger(__name__)

X_HEAVY = 'x-heavy'
Y2_HEAVY = 'y2-heavy'
MIXED = 'mixed'
LOW_PROB = 'low-prob'
SYMMETRIC = 'symmetric'
REGIMES = (X_HEAVY, Y2_HEAVY, MIXED, LOW_PROB, SYMMETRIC)

DIGITS = 6

# (p range, p/2c range) per drawn case
_RANGES = {
    'X': ((0.35, 1.0), (12.0, 40.0)),
    'Y1': ((0.25, 1.0), (1.0, 16.0 / 15.0)),
    'Y2': ((0.02, 0.24), (1.0, 16.0 / 15.0)),
    'Y3': ((0.05, 1.0), (1.1, 11.0)),
    'low': ((0.01, 0.099), (1.0, 11.0)),
}
_REGIME_CASES = {
    X_HEAVY: ('X',),
    Y2_HEAVY: ('Y2',),
    MIXED: ('X', 'Y1', 'Y2', 'Y3'),
    LOW_PROB: ('low',),
}


def parse_regime(text: str):
    """
    'mixed' -> ('mixed', None, None); 'symmetric(0.5,0.1)' ->
    ('symmetric', 0.5, 0.1)
    """
    text = text.strip()
    if text.startswith(SYMMETRIC):
        rest = text[len(SYMMETRIC):].strip()
        if not rest:
            return SYMMETRIC, 0.5, 0.1
        if not (rest.startswith('(') and rest.endswith(')')):
            raise ValidationError(f"bad symmetric regime {text!r}, expected symmetric(p,c)")
        try:
            p, c = (float(x) for x in rest[1:-1].split(','))
        except ValueError as e:
            raise ValidationError(f"bad symmetric regime {text!r}: {e}") from e
        return SYMMETRIC, p, c
    if text not in REGIMES:
        raise ValidationError(f"unknown regime {text!r}, expected one of {REGIMES}")
    return text, None, None


def _floor(x):
    return float(np.floor(x * 10 ** DIGITS) / 10 ** DIGITS)


def _draw_task(rng, task_id, case):
    (p_lo, p_hi), (r_lo, r_hi) = _RANGES[case]
    p = round(float(rng.uniform(p_lo, p_hi)), DIGITS)
    ratio = float(rng.uniform(r_lo, r_hi))
    cost = _floor(p / (2.0 * ratio))
    value = round(float(rng.uniform(0.1, 1.0)), DIGITS)
    return Task(task_id, cost, p, value)


def _coverage(rng, n) -> Valuation:
    m = max(2, n)
    weights = tuple(round(float(w), DIGITS) for w in rng.uniform(0.1, 1.0, size=m))
    covers = []
    for _ in range(n):
        size = int(rng.integers(1, min(3, m) + 1))
        covers.append(tuple(sorted(int(e) for e in rng.choice(m, size=size, replace=False))))
    return Valuation(COVERAGE, weights, tuple(covers))


def gen(seed: Optional[int], n: int, regime: str = MIXED, valuation: str = ADDITIVE,
        rng: Optional[np.random.Generator] = None) -> Instance:
    """
    A random instance with budget 1.

    Args:
        seed: Seed of the generator, ignored when rng is given
        n: Number of tasks
        regime: One of REGIMES, or 'symmetric(p,c)'
        valuation: 'additive' or 'coverage'
        rng: Generator to draw from
    """
    if n < 1:
        raise ValidationError(f"n must be at least 1, got {n}")
    if valuation not in (ADDITIVE, COVERAGE):
        raise ValidationError(f"unknown valuation {valuation!r}")
    kind, p, c = parse_regime(regime)
    rng = rng if rng is not None else np.random.default_rng(seed)

    if kind == SYMMETRIC:
        if not 0.0 < p <= 1.0 or c < 0:
            raise ValidationError(f"symmetric regime needs 0 < p <= 1 and c >= 0, got p={p}, c={c}")
        tasks = tuple(Task(i, c, p, 1.0) for i in range(n))
    else:
        cases = _REGIME_CASES[kind]
        tasks = tuple(_draw_task(rng, i, cases[int(rng.integers(len(cases)))]) for i in range(n))

    val = _coverage(rng, n) if valuation == COVERAGE else Valuation()
    logger.debug(f"Generated {regime} instance with {n} tasks (seed {seed})")
    return Instance(tasks=tasks, valuation=val, budget=1.0)
