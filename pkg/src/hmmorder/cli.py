"""Command line interface.

Subcommands: ``estimate`` (order selection on a data file),
``simulate`` (write a synthetic series), ``experiment`` (replicated
grid from a config file) and ``compare-spectral`` (operator vs spectral
baseline).  Exit codes: 0 success, 2 configuration error, 3 data error.
"""

import argparse
import os
import sys
from dataclasses import replace
from pathlib import Path

from .estimator import ThresholdRule, estimate_order, estimate_order_max_univariate
from .harness import (
    ConfigError,
    emit_table,
    load_config,
    run_experiment,
    run_method_comparison,
)
from .kernels import GAUSSIAN, VONMISES, BandwidthRule
from .seriesio import (
    LAYOUTS,
    DataError,
    DatasetDescriptor,
    export_diagnostics,
    load_series,
    save_series,
)
from .simulate import get_scenario, simulate

CONFIG_ERROR = 2
DATA_ERROR = 3


def _default_jobs() -> int:
    env = os.environ.get("HMM_ORDER_JOBS")
    try:
        return max(1, int(env)) if env else 1
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hmmorder",
        description="Order selection for nonparametric hidden Markov models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", help="estimate the order of a series from a file")
    est.add_argument("--input", required=True, help="data file path")
    est.add_argument("--layout", choices=LAYOUTS, default="columns")
    est.add_argument("--dim", type=int, default=1)
    est.add_argument("--kernel", choices=(GAUSSIAN, VONMISES), default=None,
                     help="default: gaussian for linear data, vonmises for angles")
    est.add_argument("--beta", type=float, default=None,
                     help="bandwidth exponent (default per dimension)")
    est.add_argument("--kappa", default="auto",
                     help="bandwidth scale: 'auto' or a positive number")
    est.add_argument("--tau", default="auto",
                     help="threshold: 'auto' (practical rule) or a positive number")
    est.add_argument("--lmax", type=int, default=10)
    est.add_argument("--stride", type=int, default=1,
                     help="keep every k-th observation before pairing")
    est.add_argument("--max-univariate", action="store_true",
                     help="use the max of per-coordinate estimates (dim >= 2)")
    est.add_argument("--diagnostics", default=None, metavar="OUT.csv",
                     help="write the tail statistics table here")

    sim = sub.add_parser("simulate", help="write a simulated series to a file")
    sim.add_argument("--scenario", required=True,
                     help="beta3, gauss3, vm3, gauss-shift, student-shift, "
                          "laplace-shift or exp-shift")
    sim.add_argument("--delta", type=float, default=5.0)
    sim.add_argument("--nu", type=float, default=0.1)
    sim.add_argument("--n", type=int, required=True, help="number of consecutive pairs")
    sim.add_argument("--dim", type=int, default=1)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--out", required=True)

    exp = sub.add_parser("experiment", help="run a replicated experiment grid")
    exp.add_argument("--config", required=True)
    exp.add_argument("--out", required=True)
    exp.add_argument("--format", choices=("csv", "md"), default="csv")
    exp.add_argument("--jobs", type=int, default=None)

    cmp_ = sub.add_parser("compare-spectral",
                          help="operator method vs the spectral baseline grid")
    cmp_.add_argument("--config", required=True)
    cmp_.add_argument("--out", required=True)
    cmp_.add_argument("--format", choices=("csv", "md"), default="csv")
    cmp_.add_argument("--jobs", type=int, default=None)
    return parser


def _cmd_estimate(args) -> int:
    try:
        desc = DatasetDescriptor(
            path=args.input, layout=args.layout, dim=args.dim, stride=args.stride
        )
    except ValueError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return CONFIG_ERROR
    try:
        series = load_series(desc)
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return DATA_ERROR
    kernel = args.kernel
    if kernel is None:
        kernel = VONMISES if series.kind == "circular" else GAUSSIAN
    try:
        if args.kappa == "auto":
            kappa = None
        else:
            kappa = float(args.kappa)
        if args.beta is None and kappa is not None:
            bandwidth = BandwidthRule(
                beta=BandwidthRule.default_for(series.dim, kernel).beta, kappa=kappa
            )
        elif args.beta is None:
            bandwidth = None
        else:
            bandwidth = BandwidthRule(beta=args.beta, kappa=kappa)
        threshold = None if args.tau == "auto" else ThresholdRule.explicit(float(args.tau))
        if args.max_univariate:
            estimate = estimate_order_max_univariate(
                series, kernel=kernel, bandwidth=bandwidth,
                threshold=threshold, l_max=args.lmax,
            )
        else:
            estimate = estimate_order(
                series, kernel=kernel, bandwidth=bandwidth,
                threshold=threshold, l_max=args.lmax,
            )
    except ValueError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return CONFIG_ERROR
    print(f"L_hat = {estimate.l_hat}")
    if estimate.truncated:
        print(f"note: all {estimate.l_max} inspected statistics exceed the "
              f"threshold; the estimate is a lower bound", file=sys.stderr)
    if args.diagnostics:
        export_diagnostics(estimate, args.diagnostics)
    return 0


def _cmd_simulate(args) -> int:
    try:
        spec = get_scenario(args.scenario, delta=args.delta, nu=args.nu, dim=args.dim)
        series, _ = simulate(spec, args.n, args.seed)
    except (KeyError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return CONFIG_ERROR
    save_series(series, args.out)
    return 0


def _cmd_experiment(args, compare: bool) -> int:
    try:
        config = load_config(args.config)
    except FileNotFoundError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return DATA_ERROR
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return CONFIG_ERROR
    jobs = args.jobs if args.jobs is not None else max(config.jobs, _default_jobs())
    try:
        config = replace(config, jobs=jobs)
    except ValueError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return CONFIG_ERROR
    table = run_method_comparison(config) if compare else run_experiment(config)
    # timing is excluded so identical configurations produce identical bytes
    text = emit_table(table, fmt=args.format, include_timing=False)
    Path(args.out).write_text(text, encoding="utf-8")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "estimate":
        return _cmd_estimate(args)
    if args.command == "simulate":
        return _cmd_simulate(args)
    if args.command == "experiment":
        return _cmd_experiment(args, compare=False)
    return _cmd_experiment(args, compare=True)


if __name__ == "__main__":
    sys.exit(main())
