"""
Knapsack scoring

Scoring mechanisms that make an agent exert effort on a budget-feasible
set of binary prediction tasks and report what they observed.
"""

__version__ = "0.1.0"
