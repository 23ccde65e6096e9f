"""
Mechanisms module

Recommendation procedures, greedy knapsack solvers and the case
pipelines that pick the best candidate mechanism.
"""

from .mechanism import (
    CASE_X,
    CASE_Y1,
    CASE_Y2,
    CASE_Y3,
    CASE_Y1_SEQ,
    CASE_Y2_SEQ,
    CASE_EMPTY,
    STATIC_CASES,
    SEQUENTIAL_CASES,
    VERIFIED_IC,
    VERIFIED_SEQUENTIAL,
    VERIFIED_ANALYTIC,
    UNVERIFIED,
    Provenance,
    Mechanism,
    mechanism_to_document,
    mechanism_from_document,
)
from .greedy import COST, PROB, knapsack_greedy, submodular_greedy
from .recommend import (
    TRUNCATED_COST_BUDGET,
    SEQUENTIAL_PROB_BUDGET,
    recommend_truncated,
    build_truncated_mechanism,
    threshold_key,
    threshold_condition,
    recommend_threshold_static,
    recommend_threshold_sequential,
    partition_static,
    partition_sequential,
)
from .base import CaseComponent
from .cases import TruncatedCase, SingletonCase, ThresholdCase
from .pipeline import (
    MechanismPipeline,
    analytic_check,
    empty_mechanism,
    best_of_static,
    best_of_sequential,
    save_results,
)
