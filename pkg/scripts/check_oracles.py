#!/usr/bin/env python
"""
Smoke check of the exact oracles against known values
"""

import sys
import os
import argparse

# Add the parent directory to the path so we can import the package
sys.path.insert(0, os.path.abspath(os.path.dirname(os.path.dirname(__file__))))

from src.config import ConfigLoader
from src.utils import LoggingManager
from src.agent import verify_ic
from src.bench import gen
from src.bounds import budget_headroom_bound, threshold_stop_level
from src.hardness import SubsetSumInstance, certificate_check, reduce_subset_sum
from src.mechanisms import best_of_static, knapsack_greedy
from src.model import Instance, Task, preprocess
from src.optlp import ic_opt_exact


def parse_args():
    """Parse command line arguments"""
    parser = argparse.ArgumentParser(description='Check the oracles against known values')

    parser.add_argument('--log-file', '-l',
                      help='Log file path. If not provided, logs to console only.')

    parser.add_argument('--config-file', '-c',
                      help='Path to configuration file. If not provided, looks in standard locations.')

    parser.add_argument('--seeds', type=int, default=5,
                      help='Random instances to run through the IC check')

    return parser.parse_args()


def check_greedy(logger):
    """Greedy knapsack on a fixed instance"""
    logger.info("Checking greedy knapsack...")
    tasks = [Task(i, 0.5, 1.0, v) for i, v in enumerate((4.0, 3.0, 2.0, 1.0))]
    chosen, bound = knapsack_greedy(tasks, 1.5)
    ok = chosen == frozenset({0, 1, 2}) and abs(bound - 9.0) < 1e-9
    logger.info(f"Greedy picked {sorted(chosen)} with bound {bound}")
    return ok


def check_reduction(logger):
    """Subset-sum reduction on z = (1, 2), Z = 3"""
    logger.info("Checking subset-sum reduction...")
    red = reduce_subset_sum(SubsetSumInstance((1, 2), 3))
    report = certificate_check(red, [0, 1])
    logger.info(f"k={red.k}, budget={red.raw_budget}, value={report.principal_value}")
    return red.k == 3 and red.raw_budget == 40 and report.valid and report.principal_value == 51


def check_bounds(logger):
    """Closed-form bounds"""
    logger.info("Checking analytic bounds...")
    success = 1.0 - budget_headroom_bound()
    level = threshold_stop_level(0.5, 0.1, 5)
    logger.info(f"Headroom success probability {success:.4f}, threshold stop level {level}")
    return abs(success - 0.958) < 5e-3 and level == 2


def check_random_ic(logger, seeds, limits):
    """Best static mechanism is IC on small random instances"""
    logger.info(f"Checking IC of the best static mechanism on {seeds} random instances...")
    failed = 0
    for seed in range(seeds):
        inst = preprocess(gen(seed, 3, 'x-heavy'))
        mech = best_of_static(inst, **limits)
        report = verify_ic(inst, mech, **limits)
        opt = ic_opt_exact(inst)
        if not report.holds or mech.value(inst) > opt.value + 1e-6:
            logger.error(f"Seed {seed}: holds={report.holds}, value={mech.value(inst)}, IC-OPT={opt.value}")
            failed += 1
    return failed == 0


def check_tiny_opt(logger):
    """A lone task with p/2c above one is worth its value"""
    logger.info("Checking IC-OPT on a single task...")
    inst = Instance(tasks=(Task(0, 0.1, 0.5, 2.0),), budget=1.0)
    opt = ic_opt_exact(inst)
    logger.info(f"IC-OPT value {opt.value}")
    return abs(opt.value - 2.0) < 1e-9


def main():
    """Main function"""
    # Parse command line arguments
    args = parse_args()

    # Load configuration
    config_loader = ConfigLoader(args.config_file)

    # Setup logging
    logger = LoggingManager.setup_logging(
        config=config_loader.get_logging_config(),
        log_file=args.log_file
    )
    limits = config_loader.get_limits_config()
    oracle_limits = {
        'structured_limit': limits.get('structured_tasks'),
        'guess_node_limit': limits.get('guess_nodes'),
    }
    oracle_limits = {k: v for k, v in oracle_limits.items() if v is not None}

    logger.info("Starting oracle checks...")
    checks = {
        'greedy': lambda: check_greedy(logger),
        'reduction': lambda: check_reduction(logger),
        'bounds': lambda: check_bounds(logger),
        'ic_opt': lambda: check_tiny_opt(logger),
        'random_ic': lambda: check_random_ic(logger, args.seeds, oracle_limits),
    }

    failed = []
    for name, check in checks.items():
        try:
            ok = check()
        except Exception as e:
            logger.error(f"Check {name} raised: {str(e)}")
            ok = False
        if not ok:
            failed.append(name)

    if not failed:
        logger.info("All oracle checks passed")
        print("\n✅ All oracle checks passed")
        return 0
    logger.error(f"Oracle checks failed: {failed}")
    print(f"\n❌ Oracle checks failed: {', '.join(failed)}. Check the log for details.")
    return 1


if __name__ == "__main__":
    sys.exit(main())
