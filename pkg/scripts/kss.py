#!/usr/bin/env python
"""
Knapsack scoring command line

Builds, checks and benchmarks scoring mechanisms. Every subcommand reads
and writes JSON documents (bench writes CSV); logs go to stderr.
"""

import argparse
import json
import logging
import math
import os
import sys
import traceback

# Add the parent directory to the path so we can import packages
sys.path.insert(0, os.path.abspath(os.path.dirname(os.path.dirname(__file__))))

from src.agent import (
    SequentialStrategy,
    check_not_obviously_dominated,
    sequential_monte_carlo,
    sequential_simulate,
    verify_ic,
)
from src.bench import MIXED, gen, run_bench, write_bench_csv
from src.bounds import (
    COMPANION,
    MAIN,
    PosteriorDistribution,
    alg_opt,
    budget_headroom_bound,
    pinsker_cost_bound,
    prob_budget_bound,
    symmetric_effort_upper,
    threshold_stop_level,
)
from src.config import ConfigLoader
from src.hardness import (
    SubsetSumInstance,
    certificate_check,
    reduce_subset_sum,
    threshold_certificate_mechanism,
)
from src.mechanisms import (
    best_of_sequential,
    best_of_static,
    mechanism_from_document,
    mechanism_to_document,
    partition_sequential,
    partition_static,
)
from src.model import ADDITIVE, COVERAGE, instance_to_document, load_instance, preprocess
from src.optlp import ic_opt_exact, symmetric_feasible, symmetric_max_effort
from src.utils import LoggingManager
from src.utils.errors import OracleSizeLimitError, ValidationError

__version__ = "0.1.0"

logger = logging.getLogger('kss')

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_VALIDATION = 2
EXIT_SIZE_LIMIT = 3
EXIT_INTERRUPTED = 130


class Context:
    """Loaded configuration, flattened into the keyword arguments the library takes"""

    def __init__(self, config_loader):
        self.loader = config_loader
        tolerance = config_loader.get_tolerance_config()
        limits = config_loader.get_limits_config()
        self.bench = config_loader.get_bench_config()
        self.simulation = config_loader.get_simulation_config()

        self.eval_tol = tolerance.get('eval', 1e-9)
        self.lp_tol = tolerance.get('lp', 1e-7)
        self.oracle_limits = {
            'structured_limit': limits.get('structured_tasks'),
            'tabular_limit': limits.get('tabular_tasks'),
            'guess_node_limit': limits.get('guess_nodes'),
            'to_tabular_limit': limits.get('to_tabular_tasks'),
        }
        self.oracle_limits = {k: v for k, v in self.oracle_limits.items() if v is not None}
        self.alg_opt_limit = limits.get('alg_opt_tasks', 20)
        self.ic_opt_limit = limits.get('ic_opt_tasks', 3)
        self.sequential_limit = limits.get('sequential_tasks', 20)


def _read_text(path):
    if path == '-':
        return sys.stdin.read()
    try:
        with open(path) as f:
            return f.read()
    except OSError as e:
        raise ValidationError(f"cannot read {path}: {e}") from e


def _read_json(path):
    try:
        return json.loads(_read_text(path))
    except json.JSONDecodeError as e:
        raise ValidationError(f"{path} is not valid JSON: {e}") from e


def _emit(doc, out=None):
    text = json.dumps(doc, indent=2)
    if out:
        with open(out, 'w') as f:
            f.write(text + '\n')
        logger.info(f"Wrote {out}")
    else:
        print(text)


def _finite(x):
    return x if x is not None and math.isfinite(x) else None


def _alg_opt_or_none(inst, ctx):
    if inst.n > ctx.alg_opt_limit:
        logger.warning(f"ALG-OPT skipped: {inst.n} tasks above the limit {ctx.alg_opt_limit}")
        return None
    return alg_opt(inst, limit=ctx.alg_opt_limit)


# ---------------------------------------------------------------------------
# subcommands

def cmd_gen(args, ctx):
    inst = gen(args.seed, args.n, args.regime, args.valuation)
    _emit(instance_to_document(inst), args.out)
    return EXIT_OK


def _solve(args, ctx, sequential):
    inst = preprocess(load_instance(_read_text(args.instance)))
    if sequential:
        mech = best_of_sequential(inst, ctx.eval_tol, **ctx.oracle_limits)
        cases = partition_sequential(inst)
    else:
        mech = best_of_static(inst, ctx.eval_tol, **ctx.oracle_limits)
        cases = partition_static(inst)

    doc = mechanism_to_document(mech, inst.id_map)
    doc['case_sizes'] = {label: len(ids) for label, ids in cases.items()}
    doc['value'] = mech.value(inst)
    doc['alg_opt'] = _alg_opt_or_none(inst, ctx)
    if sequential and mech.recommendation and len(mech.recommendation) <= ctx.sequential_limit:
        result = sequential_simulate(inst, mech, tol=ctx.eval_tol, limit=ctx.sequential_limit)
        doc['sequential'] = result.to_document(inst.id_map)
    _emit(doc, args.out)
    return EXIT_OK


def cmd_solve(args, ctx):
    return _solve(args, ctx, sequential=False)


def cmd_solve_seq(args, ctx):
    return _solve(args, ctx, sequential=True)


def cmd_verify_ic(args, ctx):
    inst = load_instance(_read_text(args.instance))
    mech = mechanism_from_document(_read_json(args.mechanism))
    report = verify_ic(inst, mech, ctx.eval_tol, **ctx.oracle_limits)
    _emit(report.to_document(), args.out)
    return EXIT_OK if report.holds else EXIT_FAILED


def cmd_opt(args, ctx):
    inst = preprocess(load_instance(_read_text(args.instance)))
    opt = ic_opt_exact(inst, limit=ctx.ic_opt_limit, tol=ctx.lp_tol)
    doc = opt.to_document(inst.id_map)
    # table rows and columns are indexed by position among these ids
    doc['task_ids'] = list(inst.id_map)
    doc['alg_opt'] = _alg_opt_or_none(inst, ctx)
    _emit(doc, args.out)
    return EXIT_OK


def cmd_sym_opt(args, ctx):
    level = symmetric_max_effort(args.n, args.p, args.c, ctx.lp_tol)
    scores = None
    if level > 0:
        _, rule = symmetric_feasible(args.n, args.p, args.c, level, ctx.lp_tol)
        scores = list(rule.scores)
    doc = {
        'n': args.n,
        'p': args.p,
        'c': args.c,
        'max_effort': level,
        'scores': scores,
        'effort_upper_bound': _finite(symmetric_effort_upper(args.p, args.c)),
        'threshold_stop_level': threshold_stop_level(args.p, args.c, args.n),
    }
    _emit(doc, args.out)
    return EXIT_OK


def cmd_bounds(args, ctx):
    inst = preprocess(load_instance(_read_text(args.instance))).normalized()
    tasks = list(inst.tasks)
    posts = [PosteriorDistribution.revealing(t.prob) for t in tasks]
    failure = budget_headroom_bound()
    doc = {
        'prob_budget': prob_budget_bound(tasks, MAIN, ctx.eval_tol).to_document(),
        'prob_budget_companion': prob_budget_bound(tasks, COMPANION, ctx.eval_tol).to_document(),
        'pinsker_cost': pinsker_cost_bound(posts, [t.cost for t in tasks], ctx.eval_tol).to_document(),
        'budget_headroom': {'failure_probability': failure, 'success_probability': 1.0 - failure},
        'alg_opt': _alg_opt_or_none(inst, ctx),
    }
    _emit(doc, args.out)
    return EXIT_OK


def _subset_sum(args):
    if args.subset_sum:
        return SubsetSumInstance.from_document(_read_json(args.subset_sum))
    if args.z is None or args.Z is None:
        raise ValidationError("give --subset-sum FILE or both --z and --Z")
    return SubsetSumInstance(tuple(args.z), args.Z)


def cmd_hardness_gen(args, ctx):
    red = reduce_subset_sum(_subset_sum(args))
    doc = red.to_document()
    doc['instance'] = instance_to_document(red.raw if args.raw else red.normalized)
    _emit(doc, args.out)
    return EXIT_OK


def cmd_hardness_check(args, ctx):
    red = reduce_subset_sum(_subset_sum(args))
    report = certificate_check(red, args.subset)
    doc = {'reduction': red.to_document(), 'certificate': report.to_document(), 'brute_force_ic': None}
    if report.valid:
        _, ic = threshold_certificate_mechanism(red, args.subset)
        doc['brute_force_ic'] = ic.holds if ic is not None else None
    _emit(doc, args.out)
    return EXIT_OK if report.valid else EXIT_FAILED


def cmd_seq_sim(args, ctx):
    inst = load_instance(_read_text(args.instance))
    if args.mechanism:
        mech = mechanism_from_document(_read_json(args.mechanism))
    else:
        reduced = preprocess(inst)
        mech = best_of_sequential(reduced, ctx.eval_tol, **ctx.oracle_limits).relabel(reduced.id_map)

    strategy = SequentialStrategy.fixed_order(args.order) if args.order else SequentialStrategy.eager()
    result = sequential_simulate(inst, mech, strategy, ctx.eval_tol, ctx.sequential_limit)
    doc = {
        'mechanism': mechanism_to_document(mech),
        'strategy': strategy.kind,
        'exact': result.to_document(),
        'not_obviously_dominated': check_not_obviously_dominated(result.trace, inst, mech, ctx.eval_tol),
    }

    paths = args.paths if args.paths is not None else ctx.simulation.get('paths', 0)
    if paths > 0:
        seed = args.seed if args.seed is not None else ctx.simulation.get('seed', 0)
        mc = sequential_monte_carlo(inst, mech, strategy, paths, seed, ctx.eval_tol, progress=not args.quiet)
        doc['monte_carlo'] = {
            'paths': mc.paths,
            'seed': seed,
            'mean_value': mc.mean,
            'stderr': mc.stderr,
            'completion_rate': mc.completion_rate,
        }
    _emit(doc, args.out)
    return EXIT_OK


def cmd_show_config(args, ctx):
    ctx.loader.print_config_summary()
    return EXIT_OK


def cmd_bench(args, ctx):
    seeds = args.seed_list if args.seed_list else list(range(args.seeds))
    frame = run_bench(
        seeds,
        args.n,
        args.regime,
        valuation=args.valuation,
        master_seed=args.seed if args.seed is not None else ctx.simulation.get('seed', 0),
        jobs=args.jobs or ctx.bench.get('jobs', 1),
        ic_opt_max_n=ctx.bench.get('ic_opt_max_n', ctx.ic_opt_limit),
        include_timing=args.timing or bool(ctx.bench.get('timing', False)),
        progress=not args.quiet,
    )
    text = write_bench_csv(frame, args.out)
    if not args.out:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing

def parse_args(argv=None):
    """Parse command line args"""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config-file', '-c', help='Config file path')
    common.add_argument('--log-file', '-l', help='Log file path (default: stderr only)')
    common.add_argument('--debug', action='store_true', help='Enable debug logging')
    common.add_argument('--quiet', '-q', action='store_true', help='Hide progress bars')
    common.add_argument('--out', '-o', help='Output file (default: stdout)')

    parser = argparse.ArgumentParser(
        description='Knapsack scoring mechanisms',
        epilog='Example: kss.py gen --seed 1 --n 5 --regime mixed | kss.py solve --instance -'
    )
    parser.add_argument('--version', '-v', action='version', version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('gen', parents=[common], help='Generate a random instance')
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--n', type=int, required=True)
    p.add_argument('--regime', default=MIXED,
                   help='x-heavy, y2-heavy, mixed, low-prob or symmetric(p,c)')
    p.add_argument('--valuation', choices=(ADDITIVE, COVERAGE), default=ADDITIVE)
    p.set_defaults(handler=cmd_gen)

    for name, handler, text in (('solve', cmd_solve, 'Best mechanism for a static agent'),
                                ('solve-seq', cmd_solve_seq, 'Best mechanism for a sequential agent')):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument('--instance', '-i', required=True, help="Instance JSON ('-' for stdin)")
        p.set_defaults(handler=handler)

    p = sub.add_parser('verify-ic', parents=[common], help='Check a mechanism for incentive compatibility')
    p.add_argument('--instance', '-i', required=True)
    p.add_argument('--mechanism', '-m', required=True)
    p.set_defaults(handler=cmd_verify_ic)

    p = sub.add_parser('opt', parents=[common], help='Exact optimal mechanism (small instances)')
    p.add_argument('--instance', '-i', required=True)
    p.set_defaults(handler=cmd_opt)

    p = sub.add_parser('sym-opt', parents=[common], help='Largest effort level for i.i.d. tasks')
    p.add_argument('--n', type=int, required=True)
    p.add_argument('--p', type=float, required=True)
    p.add_argument('--c', type=float, required=True)
    p.set_defaults(handler=cmd_sym_opt)

    p = sub.add_parser('bounds', parents=[common], help='Analytic bounds for an instance')
    p.add_argument('--instance', '-i', required=True)
    p.set_defaults(handler=cmd_bounds)

    for name, handler, text in (('hardness-gen', cmd_hardness_gen, 'Reduce a subset-sum instance'),
                                ('hardness-check', cmd_hardness_check, 'Check a subset-sum certificate')):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument('--subset-sum', '-s', help='Subset-sum JSON {"z": [...], "Z": ...}')
        p.add_argument('--z', type=int, nargs='+')
        p.add_argument('--Z', type=int)
        p.set_defaults(handler=handler)
        if name == 'hardness-gen':
            p.add_argument('--raw', action='store_true', help='Emit the integer-cost instance')
        else:
            p.add_argument('--subset', type=int, nargs='*', default=[], help='Indices of the certificate')

    p = sub.add_parser('seq-sim', parents=[common], help='Simulate a sequential agent')
    p.add_argument('--instance', '-i', required=True)
    p.add_argument('--mechanism', '-m', help='Mechanism JSON (default: solve-seq result)')
    p.add_argument('--order', type=int, nargs='+', help='Fixed task order (default: eager marginal)')
    p.add_argument('--paths', type=int, help='Monte-Carlo paths (0 to skip)')
    p.add_argument('--seed', type=int)
    p.set_defaults(handler=cmd_seq_sim)

    p = sub.add_parser('bench', parents=[common], help='Benchmark table as CSV')
    p.add_argument('--seeds', type=int, default=10, help='Use seeds 0..N-1')
    p.add_argument('--seed-list', type=int, nargs='*', help='Explicit instance seeds')
    p.add_argument('--seed', type=int, help='Master seed')
    p.add_argument('--n', type=int, nargs='+', default=[3])
    p.add_argument('--regime', nargs='+', default=[MIXED])
    p.add_argument('--valuation', choices=(ADDITIVE, COVERAGE), default=ADDITIVE)
    p.add_argument('--jobs', '-j', type=int)
    p.add_argument('--timing', action='store_true', help='Add the runtime_ms column')
    p.set_defaults(handler=cmd_bench)

    p = sub.add_parser('show-config', parents=[common], help='Print the merged configuration')
    p.set_defaults(handler=cmd_show_config)

    return parser.parse_args(argv)


def main(argv=None):
    """Main entry point"""
    args = parse_args(argv)

    try:
        config_loader = ConfigLoader(args.config_file)
    except Exception as e:
        print(f"Error loading configuration: {e}", file=sys.stderr)
        return EXIT_FAILED

    LoggingManager.setup_logging(
        config=config_loader.get_logging_config(),
        log_file=args.log_file,
        level='DEBUG' if args.debug else None,
    )
    ctx = Context(config_loader)

    try:
        return args.handler(args, ctx)
    except ValidationError as e:
        logger.error(f"Invalid input: {e}")
        return EXIT_VALIDATION
    except OracleSizeLimitError as e:
        logger.error(f"Instance too large: {e}")
        return EXIT_SIZE_LIMIT
    except KeyboardInterrupt:
        logger.warning("Operation cancelled by user")
        return EXIT_INTERRUPTED
    except Exception as e:
        logger.error(f"{args.command} failed: {e}")
        logger.debug(traceback.format_exc())
        return EXIT_FAILED


if __name__ == "__main__":
    # Catch Ctrl+C gracefully
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        print("\n\nOperation cancelled by user", file=sys.stderr)
        sys.exit(EXIT_INTERRUPTED)
