"""
Model module

Instances, valuations, and the signal/outcome spaces.
"""

from .instance import (
    ADDITIVE,
    COVERAGE,
    Task,
    Valuation,
    Instance,
    valuation_value,
    marginal_value,
    preprocess,
    load_instance,
    instance_from_document,
    instance_to_document,
)
from .signals import (
    Trit,
    SignalProfile,
    Outcome,
    EffortBranch,
    enumerate_effort_outcomes,
    signal_index,
    outcome_index,
    signal_from_index,
    outcome_from_index,
    iter_signal_profiles,
    iter_outcomes,
)
