"""
Benchmark runner

One row per (seed, n, regime). Each row draws from its own generator
keyed by (master seed, instance seed, row index), so running rows in
worker processes gives the same table as running them in order.
"""

import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from typing import Iterable, Optional, Sequence

import numpy as np
import pandas as pd
from tqdm import tqdm

from ..bounds import alg_opt
from ..config.config_loader import DEFAULT_ALG_OPT_LIMIT, DEFAULT_IC_OPT_LIMIT, DEFAULT_JOBS, DEFAULT_SEED
from ..mechanisms import STATIC_CASES, best_of_static, partition_static
from ..model import ADDITIVE, preprocess
from ..optlp import ic_opt_exact
from ..utils import LoggingManager
from .generate import gen

logger = logging.getLogger(__name__)

COLUMNS = (
    ['seed', 'n', 'regime', 'valuation']
    + [f"case_{label}" for label in STATIC_CASES]
    + ['mechanism', 'value', 'alg_opt', 'ic_opt', 'ratio_vs_alg_opt', 'ratio_vs_ic_opt', 'ic_holds', 'error']
)
TIMING_COLUMN = 'runtime_ms'
FLOAT_FORMAT = '%.10g'


def _ratio(value, reference):
    if reference is None or not reference > 0:
        return None
    return value / reference


def bench_row(index, seed, n, regime, valuation=ADDITIVE, master_seed=DEFAULT_SEED,
              ic_opt_max_n=DEFAULT_IC_OPT_LIMIT, include_timing=False):
    """Generate, solve and score one instance; failures land in 'error'"""
    start = time.perf_counter()
    row = {column: None for column in COLUMNS}
    row.update({'seed': seed, 'n': n, 'regime': regime, 'valuation': valuation, 'ic_holds': False})

    try:
        rng = np.random.default_rng([master_seed, seed, index])
        inst = preprocess(gen(seed, n, regime, valuation, rng=rng))
        for label, ids in partition_static(inst).items():
            row[f"case_{label}"] = len(ids)

        mech = best_of_static(inst)
        value = mech.value(inst)
        row.update({
            'mechanism': f"{mech.provenance.case}:{mech.provenance.procedure}",
            'value': value,
            'ic_holds': True,
        })
        if inst.n <= DEFAULT_ALG_OPT_LIMIT:
            row['alg_opt'] = alg_opt(inst)
            row['ratio_vs_alg_opt'] = _ratio(value, row['alg_opt'])
        if inst.n <= ic_opt_max_n:
            row['ic_opt'] = ic_opt_exact(inst).value
            row['ratio_vs_ic_opt'] = _ratio(value, row['ic_opt'])
    except Exception as e:
        logger.error(f"Bench row {index} (seed {seed}, n={n}, {regime}) failed: {e}")
        row['error'] = f"{type(e).__name__}: {e}"

    if include_timing:
        row[TIMING_COLUMN] = round((time.perf_counter() - start) * 1000.0, 3)
    return row


def _row_args(seeds, sizes, regimes):
    index = 0
    for regime in regimes:
        for n in sizes:
            for seed in seeds:
                yield index, seed, n, regime
                index += 1


@LoggingManager.log_execution_time
def run_bench(seeds: Iterable[int], sizes: Sequence[int], regimes: Sequence[str], valuation=ADDITIVE,
              master_seed=DEFAULT_SEED, jobs=DEFAULT_JOBS, ic_opt_max_n=DEFAULT_IC_OPT_LIMIT,
              include_timing=False, progress=True) -> pd.DataFrame:
    """
    Run the benchmark grid.

    Args:
        seeds: Instance seeds
        sizes: Task counts
        regimes: Generator regimes
        jobs (int): Worker processes; 1 runs in this process
        include_timing (bool): Add the runtime_ms column

    Returns:
        DataFrame: One row per (regime, n, seed) in that nesting order
    """
    work = list(_row_args(list(seeds), list(sizes), list(regimes)))
    options = dict(valuation=valuation, master_seed=master_seed,
                   ic_opt_max_n=ic_opt_max_n, include_timing=include_timing)
    logger.info(f"Benchmark: {len(work)} rows with {jobs} job(s)")

    rows = {}
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            futures = {executor.submit(bench_row, *args, **options): args[0] for args in work}
            for future in tqdm(as_completed(futures), total=len(futures), desc="bench", disable=not progress):
                rows[futures[future]] = future.result()
    else:
        for args in tqdm(work, desc="bench", disable=not progress):
            rows[args[0]] = bench_row(*args, **options)

    columns = COLUMNS + [TIMING_COLUMN] if include_timing else list(COLUMNS)
    frame = pd.DataFrame([rows[i] for i in sorted(rows)], columns=columns)

    worst = worst_ratio(frame)
    if not math.isnan(worst):
        logger.info(f"Worst value / IC-OPT ratio: {worst:.6g}")
    failed = int(frame['error'].notna().sum())
    if failed:
        logger.warning(f"{failed} of {len(frame)} benchmark rows failed")
    return frame


def write_bench_csv(frame: pd.DataFrame, out: Optional[str] = None) -> Optional[str]:
    """CSV text when out is None, otherwise write the file and return its path"""
    text = frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
    if out is None:
        return text
    with open(out, 'w', newline='') as f:
        f.write(text)
    logger.info(f"Wrote {len(frame)} benchmark rows to {out}")
    return out


def worst_ratio(frame: pd.DataFrame, column='ratio_vs_ic_opt') -> float:
    values = frame[column].dropna()
    return float(values.min()) if len(values) else math.nan
