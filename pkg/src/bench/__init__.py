"""
Benchmark module

Seeded instance generation and the benchmark table.
"""

from .generate import (
    X_HEAVY,
    Y2_HEAVY,
    MIXED,
    LOW_PROB,
    SYMMETRIC,
    REGIMES,
    parse_regime,
    gen,
)
from .runner import COLUMNS, TIMING_COLUMN, bench_row, run_bench, write_bench_csv, worst_ratio
