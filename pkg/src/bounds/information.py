"""
General information structures

A task's signal is summarized by the distribution of the posterior
mean it induces. These bounds say how much effort such signals can
pay for.
"""

import logging
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

from ..config.config_loader import DEFAULT_EVAL_TOL
from ..utils.errors import ValidationError
from .analytic import BoundReport

logger = logging.getLogger(__name__)

PLAUSIBILITY_TOL = 1e-9


@dataclass(frozen=True)
class PosteriorDistribution:
    """(posterior mean, probability) atoms, averaging to the prior 1/2"""
    atoms: Tuple[Tuple[float, float], ...]

    def __post_init__(self):
        atoms = tuple((float(mu), float(q)) for mu, q in self.atoms)
        object.__setattr__(self, 'atoms', atoms)
        if not atoms:
            raise ValidationError("posterior distribution needs at least one atom")
        for mu, q in atoms:
            if not 0.0 <= mu <= 1.0 or q < 0.0:
                raise ValidationError(f"bad posterior atom ({mu}, {q})")
        mass = sum(q for _, q in atoms)
        if abs(mass - 1.0) > PLAUSIBILITY_TOL:
            raise ValidationError(f"posterior probabilities sum to {mass}, not 1")
        mean = sum(mu * q for mu, q in atoms)
        if abs(mean - 0.5) > PLAUSIBILITY_TOL:
            raise ValidationError(f"posterior mean averages to {mean}, not the prior 1/2")

    @classmethod
    def revealing(cls, p):
        """The binary model: state revealed w.p. p, nothing learned otherwise"""
        atoms = [(0.0, p / 2.0), (1.0, p / 2.0)]
        if p < 1.0:
            atoms.append((0.5, 1.0 - p))
        return cls(tuple(atoms))

    @classmethod
    def symmetric(cls, p):
        """Always a noisy hint: posterior (1 +- p)/2 w.p. 1/2 each"""
        return cls((((1.0 - p) / 2.0, 0.5), ((1.0 + p) / 2.0, 0.5)))

    @classmethod
    def uninformative(cls):
        return cls(((0.5, 1.0),))


def _kl_uniform(mu):
    if mu <= 0.0 or mu >= 1.0:
        return math.inf
    return 0.5 * math.log(0.5 / mu) + 0.5 * math.log(0.5 / (1.0 - mu))


def kl_stat(post: PosteriorDistribution) -> float:
    """Expected KL divergence from the uniform prior to the posterior"""
    total = 0.0
    for mu, q in post.atoms:
        if q == 0.0:
            continue
        total += q * _kl_uniform(mu)
    return total


def pinsker_cost_bound(posts: Sequence[PosteriorDistribution], costs: Sequence[float],
                       tol=DEFAULT_EVAL_TOL) -> BoundReport:
    """Total cost an incentivizable set can carry: sqrt(sum of KL / 2)"""
    if len(posts) != len(costs):
        raise ValidationError("need one cost per posterior distribution")
    lam = sum(kl_stat(post) for post in posts)
    bound = math.sqrt(lam / 2.0)
    total = float(sum(costs))
    return BoundReport('pinsker_cost', bound, total <= bound + tol, detail=f"sum c = {total:.6g}, sum KL = {lam:.6g}")


def pinsker_size_bound(lam: float, cost: float) -> float:
    """Largest incentivizable set of i.i.d. tasks with per-task KL lam: lam / 2c^2"""
    if cost <= 0:
        return math.inf
    return lam / (2.0 * cost ** 2)


def info_gain_single(post: PosteriorDistribution) -> float:
    """E|mu - 1/2|; a lone task is worth its cost c iff this is at least c"""
    return float(sum(q * abs(mu - 0.5) for mu, q in post.atoms))
