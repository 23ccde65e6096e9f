"""
Agent module

Best-response oracles, incentive-compatibility checks and the
sequential-effort simulator.
"""

from .policy import ReportAction, ReportPolicy, ReportMap, BestResponse, ICReport
from .oracle import (
    subsets_in_order,
    joint_report_distribution,
    expected_utility,
    best_response,
    verify_ic,
    proper_deviation_gap,
    restrict_tabular_rule,
)
from .sequential import (
    EAGER_MARGINAL,
    FIXED_ORDER_GREEDY,
    SEQUENTIAL_GUARANTEES,
    SequentialStrategy,
    SequentialResult,
    SequentialCheck,
    TraceStep,
    MonteCarloEstimate,
    SequentialSimulator,
    sequential_simulate,
    sequential_monte_carlo,
    one_step_marginal,
    check_not_obviously_dominated,
    verify_sequential,
)
