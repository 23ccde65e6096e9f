"""
Optimal-mechanism LP module

A dense simplex core and the exact oracles built on it.
"""

from .lp import LE, GE, EQ, LPStatus, LPResult, LinearProgram
from .simplex import simplex_solve
from .ic_opt import ICOptimum, ic_feasible, ic_opt_exact
from .symmetric import SymmetricRule, symmetric_feasible, symmetric_max_effort
