"""
Scoring module

Rule families, their constructors and exact expected-score evaluators.
"""

from .rules import (
    INFLATED_CAP,
    TRUNCATED_SCALE,
    ReportKind,
    SingleTaskRule,
    TruncatedSeparateRule,
    ThresholdRule,
    TabularRule,
    ScoringRule,
    is_structured,
    realized_score,
    single_budget_minimal,
    build_truncated_separate,
)
from .evaluate import (
    poisson_binomial_pmf,
    merge_support,
    convolve_discrete,
    expected_score,
    expected_score_threshold,
    expected_score_threshold_policy,
    expected_score_truncated,
    expected_score_single,
    expected_score_reports,
    truncated_sum_distribution,
)
from .tabular import to_tabular, max_over_separate_score, belief_proper_wrapper
from .codec import rule_to_document, rule_from_document
