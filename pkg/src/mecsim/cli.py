"""Command-line interface: run simulations, compare policies, list
scenarios, and fuzz the queue implementation against its oracle.

Exit codes: 0 success, 1 runtime failure, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import fuzz
from .charts import render_chart
from .metrics import AggregateStats, aggregate, write_csv
from .simulation import (
    ARRIVAL_BATCH,
    ARRIVAL_MODELS,
    ARRIVAL_UNIFORM,
    POLICIES,
    POLICY_FIFO,
    POLICY_PREFERENTIAL,
    SimParams,
    run_many,
)
from .workload import ScenarioConfig, ScenarioError, builtin_scenario, parse_scenario_file

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2

OUT_DIR_ENV = "MECSIM_OUT_DIR"


class UsageError(Exception):
    pass


def _out_dir(args) -> Path:
    configured = getattr(args, "out_dir", None)
    if configured:
        return Path(configured)
    return Path(os.environ.get(OUT_DIR_ENV, "."))


def _load_scenarios(args) -> list[ScenarioConfig]:
    if getattr(args, "all", False):
        return [builtin_scenario(n) for n in (1, 2, 3)]
    if args.scenario is not None:
        try:
            return [builtin_scenario(args.scenario)]
        except ScenarioError as exc:
            raise UsageError(str(exc)) from exc
    if args.scenario_file is not None:
        return [parse_scenario_file(args.scenario_file)]
    raise UsageError("no scenario selected")


def _params(args, policy: str) -> SimParams:
    params = SimParams(
        max_forwards=args.max_forwards,
        queue_policy=policy,
        arrival_model=args.arrival,
        horizon=args.horizon,
        seed=args.seed,
        exclude_origin=args.exclude_origin,
    )
    params.validate()
    return params


def _add_sim_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--reps", type=int, default=40, help="replications (default 40)")
    parser.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    parser.add_argument(
        "--max-forwards", type=int, default=2,
        help="forwarding budget per request (default 2)",
    )
    parser.add_argument(
        "--arrival", choices=ARRIVAL_MODELS, default=ARRIVAL_BATCH,
        help="arrival model (default batch_at_zero)",
    )
    parser.add_argument(
        "--horizon", type=float, default=0,
        help=f"arrival window length, required for {ARRIVAL_UNIFORM}",
    )
    parser.add_argument(
        "--exclude-origin", action="store_true",
        help="never forward a request back to its origin node",
    )
    parser.add_argument(
        "--workers", type=int, default=1,
        help="worker processes for replications (default 1)",
    )


def _scenario_arguments(parser: argparse.ArgumentParser, allow_all: bool) -> None:
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--scenario", type=int, help="builtin scenario number (1-3)")
    group.add_argument("--scenario-file", help="path to a scenario JSON file")
    if allow_all:
        group.add_argument(
            "--all", action="store_true", help="all three builtin scenarios"
        )


def _summary_line(stats: AggregateStats) -> str:
    return (
        f"{stats.scenario} {stats.policy}: reps={stats.replications} "
        f"met_rate={stats.met_rate:.6f} (sd {stats.met_sd:.6f}) "
        f"forward_rate={stats.forward_rate:.6f} (sd {stats.forward_sd:.6f})"
    )


def cmd_run(args) -> int:
    scenario = _load_scenarios(args)[0]
    params = _params(args, args.policy)
    if args.reps < 1:
        raise UsageError("--reps must be >= 1")
    if args.trace_dir:
        Path(args.trace_dir).mkdir(parents=True, exist_ok=True)
    results = run_many(
        scenario, params, args.reps, workers=args.workers, trace_dir=args.trace_dir
    )
    stats = aggregate(results, scenario.name, params.queue_policy)
    out = Path(args.out) if args.out else _out_dir(args) / (
        f"run_{scenario.name}_{params.queue_policy}.csv"
    )
    write_csv([stats], out)
    if args.chart:
        render_chart([stats], "met_rate", args.chart)
    print(_summary_line(stats))
    print(f"wrote {out}")
    return EXIT_OK


def cmd_compare(args) -> int:
    scenarios = _load_scenarios(args)
    if args.reps < 1:
        raise UsageError("--reps must be >= 1")
    if args.reps == 1:
        print("warning: averages are single-sample with --reps 1", file=sys.stderr)
    out_dir = _out_dir(args)
    out_dir.mkdir(parents=True, exist_ok=True)

    all_stats: list[AggregateStats] = []
    for scenario in scenarios:
        per_policy: dict[str, AggregateStats] = {}
        for policy in (POLICY_FIFO, POLICY_PREFERENTIAL):
            params = _params(args, policy)
            results = run_many(scenario, params, args.reps, workers=args.workers)
            per_policy[policy] = aggregate(results, scenario.name, policy)
        all_stats.extend(per_policy.values())
        met_delta = (
            per_policy[POLICY_PREFERENTIAL].met_rate
            - per_policy[POLICY_FIFO].met_rate
        )
        fwd_delta = (
            per_policy[POLICY_PREFERENTIAL].forward_rate
            - per_policy[POLICY_FIFO].forward_rate
        )
        print(
            f"{scenario.name}: met_rate delta {met_delta:+.6f}, "
            f"forward_rate delta {fwd_delta:+.6f}"
        )

    csv_path = out_dir / "compare.csv"
    write_csv(all_stats, csv_path)
    met_svg = out_dir / "met_rate.svg"
    fwd_svg = out_dir / "forward_rate.svg"
    render_chart(all_stats, "met_rate", met_svg)
    render_chart(all_stats, "forward_rate", fwd_svg)
    print(f"wrote {csv_path}, {met_svg}, {fwd_svg}")
    return EXIT_OK


def cmd_scenarios(args) -> int:
    for n in (1, 2, 3):
        scenario = builtin_scenario(n)
        per_node = ", ".join(
            f"{node}={scenario.node_total(node)}" for node in scenario.nodes
        )
        print(
            f"{scenario.name}: {len(scenario.nodes)} nodes, "
            f"{scenario.total_requests()} requests ({per_node})"
        )
    return EXIT_OK


def cmd_validate(args) -> int:
    if args.fuzz <= 0:
        print("nothing to check: --fuzz must be positive", file=sys.stderr)
        return EXIT_USAGE

    equivalence = fuzz.run_oracle_equivalence(
        args.fuzz, args.seed, inject_fault=args.inject_fault
    )
    print(f"oracle equivalence: {equivalence.cases} cases, "
          f"{len(equivalence.failures)} failures")
    invariants = fuzz.run_invariant_fuzz(max(args.fuzz, 1), args.seed + 1)
    print(f"invariant interleavings: {invariants.cases} operations, "
          f"{len(invariants.failures)} failures")
    forced = fuzz.run_forced_fifo(max(args.fuzz // 10, 1), args.seed + 2)
    print(f"forced-vs-fifo: {forced.cases} cases, {len(forced.failures)} failures")

    failures = equivalence.failures + invariants.failures + forced.failures
    for failure in failures:
        print(failure, file=sys.stderr)
    return EXIT_RUNTIME if failures else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mecsim",
        description="Simulate deadline-aware load orchestration over MEC nodes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one scenario with one queue policy")
    _scenario_arguments(run, allow_all=False)
    run.add_argument(
        "--policy", choices=POLICIES, default=POLICY_PREFERENTIAL,
        help="queue policy (default preferential)",
    )
    _add_sim_options(run)
    run.add_argument("--out", help="CSV output path")
    run.add_argument("--chart", help="also write a met_rate SVG chart here")
    run.add_argument("--out-dir", help=f"output directory (default ${OUT_DIR_ENV} or .)")
    run.add_argument(
        "--trace-dir",
        help="write one event trace file per replication into this directory",
    )
    run.set_defaults(func=cmd_run)

    compare = sub.add_parser("compare", help="run both policies on the same seeds")
    _scenario_arguments(compare, allow_all=True)
    _add_sim_options(compare)
    compare.add_argument(
        "--out-dir", help=f"output directory (default ${OUT_DIR_ENV} or .)"
    )
    compare.set_defaults(func=cmd_compare)

    scenarios = sub.add_parser("scenarios", help="list builtin scenarios")
    scenarios.set_defaults(func=cmd_scenarios)

    validate = sub.add_parser(
        "validate", help="fuzz the queue against its independent oracle"
    )
    validate.add_argument("--fuzz", type=int, default=10_000, help="number of cases")
    validate.add_argument("--seed", type=int, default=0)
    validate.add_argument(
        "--inject-fault", action="store_true",
        help="deliberately relax the deadline check to prove the fuzz bites",
    )
    validate.set_defaults(func=cmd_validate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ScenarioError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
