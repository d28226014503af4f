"""Command-line front end: estimate, schedule, verify.

Output is a single JSON object on stdout; progress and errors go to stderr.
Exit codes: 0 success, 2 usage, 3 malformed input, 4 unsupported model
parameterization, 5 verification failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time

from .annealer import AnnealConfig, estimate_ratio, estimate_ratio_boosted
from .core import HamiltonianHistogram, format_beta, parse_beta
from .errors import (EnumerationBudgetError, InputFormatError,
                     UnsupportedParameterizationError, ZratioError)
from .models import Graph, ModelSpec, enumerate_histogram, reduce_model
from .oracles import McmcConfig, histogram_oracle_factory, model_oracle_factory
from .schedule import (ScheduleParameters, build_refined_schedule,
                       truncate_schedule)
from .verify import SUITES, run_suites

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_UNSUPPORTED = 4
EXIT_VERIFY = 5

_EPILOG = """exit codes:
  0  success
  2  usage error (bad flags or invalid parameters)
  3  malformed input file or enumeration budget exceeded
  4  unsupported model parameterization (Ising lambda != 1, hard-core lambda > 1)
  5  verification suite failure
"""


def _json_num(x: float):
    """JSON-safe float: finite values pass through, infinities become tokens."""
    if x is None or math.isfinite(x):
        return x
    return "inf" if x > 0 else "-inf"


def _exp_or_none(log_x: float):
    if -745.0 < log_x < 709.0:
        return math.exp(log_x)
    return None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zratio",
        description="Estimate ratios of Gibbs partition functions by "
                    "parallel simulated annealing.",
        epilog=_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    est = sub.add_parser(
        "estimate", epilog=_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
        help="estimate Z(beta_max)/Z(beta_min) for a histogram or a model")
    est.add_argument("--histogram", metavar="FILE",
                     help='histogram JSON file {"counts": [...]}')
    est.add_argument("--model", choices=["ising", "hardcore"])
    est.add_argument("--graph", metavar="FILE",
                     help='edge list: first line "n m", then "u v" lines')
    est.add_argument("--gamma", type=float, default=1.0,
                     help="Ising edge activity (default 1)")
    est.add_argument("--lambda", dest="lam", type=float, default=1.0,
                     help="vertex activity / fugacity (default 1)")
    est.add_argument("--beta-min", default=None,
                     help="histogram runs only (default 0)")
    est.add_argument("--beta-max", default=None,
                     help='histogram runs only; accepts "inf" (default inf)')
    est.add_argument("--eps", type=float, default=0.1,
                     help="multiplicative accuracy target (default 0.1)")
    est.add_argument("--delta", type=float, default=None,
                     help="enable median boosting to failure probability delta")
    est.add_argument("--seed", type=int, default=0)
    est.add_argument("--mode", choices=["eager", "lazy"], default="lazy",
                     help="eager = one oracle round (max allocation), "
                          "lazy = log-many rounds, fewer samples")
    est.add_argument("--sampler", choices=["exact", "glauber"],
                     default="exact",
                     help="exact enumerates the model (n <= 24); glauber "
                          "runs MCMC chains")
    est.add_argument("--burn-in", type=int, default=None,
                     help="Glauber steps per sample (default 50 n ceil(ln n + 1))")
    est.add_argument("--q-bar", type=float, default=None,
                     help="override the ln|Omega| upper bound")
    est.add_argument("--workers", type=int, default=1,
                     help="concurrent sampling tasks per round")
    est.set_defaults(func=cmd_estimate)

    sch = sub.add_parser("schedule", help="emit the refined cooling schedule")
    sch.add_argument("--q", dest="q_bar", type=float, required=True,
                     help="upper bound on ln|Omega|")
    sch.add_argument("--h", type=int, required=True, help="max energy level")
    sch.add_argument("--beta-min", default=None, help="optional truncation")
    sch.add_argument("--beta-max", default=None, help='optional truncation ("inf" ok)')
    sch.set_defaults(func=cmd_schedule)

    ver = sub.add_parser("verify", help="run the verification battery")
    ver.add_argument("--suite", choices=["all"] + sorted(SUITES),
                     default="all")
    ver.add_argument("--trials", type=int, default=None,
                     help="override the suite's default trial count")
    ver.add_argument("--seed", type=int, default=0)
    ver.set_defaults(func=cmd_verify)
    return parser


def _load_text(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputFormatError(f"cannot read {path}: {exc.strerror}")


def cmd_estimate(args) -> int:
    t0 = time.perf_counter()
    if (args.histogram is None) == (args.model is None):
        print("error: exactly one input source: --histogram FILE or "
              "--model {ising,hardcore} --graph FILE", file=sys.stderr)
        return EXIT_USAGE

    reduction = None
    if args.histogram is not None:
        hist = HamiltonianHistogram.from_json_text(_load_text(args.histogram))
        beta_min = parse_beta(args.beta_min if args.beta_min is not None
                              else 0.0, name="beta-min")
        beta_max = parse_beta(args.beta_max if args.beta_max is not None
                              else math.inf, name="beta-max")
        q_bar = args.q_bar if args.q_bar is not None else max(hist.q, 1.0)
        h = 0 if hist.is_constant() else hist.h
        factory = histogram_oracle_factory(hist, args.seed,
                                           workers=args.workers)
    else:
        if args.graph is None:
            print("error: --model needs --graph FILE", file=sys.stderr)
            return EXIT_USAGE
        if args.beta_min is not None or args.beta_max is not None:
            print("error: model runs take their beta range from the "
                  "reduction; --beta-min/--beta-max apply to histograms",
                  file=sys.stderr)
            return EXIT_USAGE
        graph = Graph.from_edge_list_text(_load_text(args.graph))
        spec = ModelSpec(args.model, gamma=args.gamma, lam=args.lam)
        reduction = reduce_model(graph, spec)
        beta_min, beta_max = reduction.beta_min, reduction.beta_max
        q_bar = (args.q_bar if args.q_bar is not None
                 else max(graph.n * math.log(2.0), 1.0))
        h = reduction.h
        if args.sampler == "exact":
            hist = enumerate_histogram(graph, spec)
            factory = histogram_oracle_factory(hist, args.seed,
                                               workers=args.workers)
        else:
            factory = model_oracle_factory(
                reduction, args.seed, q_bar=q_bar,
                mcmc=McmcConfig(burn_in=args.burn_in), workers=args.workers)

    if reduction is not None and reduction.trivial:
        # gamma = 1: both endpoints coincide and the ratio is exactly 1
        from .core import CostMetrics, RatioEstimate

        result = RatioEstimate(0.0, CostMetrics())
    else:
        config = AnnealConfig(beta_min=beta_min, beta_max=beta_max,
                              eps=args.eps, q_bar=q_bar, h=h, mode=args.mode,
                              seed=args.seed, boost_delta=args.delta,
                              workers=args.workers)
        if args.delta is not None:
            result = estimate_ratio_boosted(config, factory)
        else:
            result = estimate_ratio(config, factory)

    report = {
        "log_q_hat": _json_num(result.log_q_hat),
        "q_hat": _exp_or_none(result.log_q_hat),
        "log_z_model": None,
        "z_model": None,
        "metrics": result.metrics.to_json_obj(),
        "config": {
            "input": args.histogram or args.graph,
            "model": args.model,
            "gamma": args.gamma if args.model == "ising" else None,
            "lambda": args.lam if args.model == "hardcore" else None,
            "beta_min": format_beta(beta_min),
            "beta_max": format_beta(beta_max),
            "eps": args.eps,
            "delta": args.delta,
            "mode": args.mode,
            "sampler": args.sampler if args.model else None,
            "burn_in": args.burn_in,
            "q_bar": q_bar,
            "h": h,
            "workers": args.workers,
        },
        "seed": args.seed,
        "wall_time_ms": (time.perf_counter() - t0) * 1000.0,
    }
    if reduction is not None:
        log_z = reduction.log_z_model(result.log_q_hat)
        report["log_z_model"] = _json_num(log_z)
        report["z_model"] = _exp_or_none(log_z)
    print(json.dumps(report))
    return EXIT_OK


def cmd_schedule(args) -> int:
    try:
        params = ScheduleParameters(q_bar=args.q_bar, h=args.h)
        sched = build_refined_schedule(params)
        if args.beta_min is not None or args.beta_max is not None:
            beta_min = parse_beta(args.beta_min if args.beta_min is not None
                                  else 0.0, name="beta-min")
            beta_max = parse_beta(args.beta_max if args.beta_max is not None
                                  else math.inf, name="beta-max")
            sched = truncate_schedule(sched, beta_min, beta_max)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print("usage: zratio schedule --q Q_BAR --h H "
              "[--beta-min B] [--beta-max B]", file=sys.stderr)
        return EXIT_USAGE
    print(json.dumps(sched.to_json_obj()))
    return EXIT_OK


def cmd_verify(args) -> int:
    names = sorted(SUITES) if args.suite == "all" else [args.suite]
    failed = False
    for result in run_suites(names, trials=args.trials, seed=args.seed):
        for line in result.lines:
            print(f"[{result.name}] {line}")
        failed = failed or not result.passed
    print("verification:", "FAIL" if failed else "PASS")
    return EXIT_VERIFY if failed else EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UnsupportedParameterizationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (InputFormatError, EnumerationBudgetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ZratioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
