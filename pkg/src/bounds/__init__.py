"""
Bounds module

ALG-OPT, analytic caps on incentivizable sets and information bounds.
"""

from .knapsack import fractional_knapsack, alg_opt, alg_opt_set
from .analytic import (
    MAIN,
    COMPANION,
    HOEFFDING,
    BERNSTEIN,
    BoundReport,
    pivotal_key,
    prob_budget_bound,
    symmetric_effort_applicable,
    symmetric_effort_upper,
    threshold_stop_level,
    tail_bounds,
    budget_headroom_bound,
)
from .information import (
    PosteriorDistribution,
    kl_stat,
    pinsker_cost_bound,
    pinsker_size_bound,
    info_gain_single,
)
