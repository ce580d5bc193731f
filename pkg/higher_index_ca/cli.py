"""Command line entry point: ``hica <command> ...``.

Exit codes: 0 success (or a valid array), 1 verification failure, 2 usage,
parse or configuration error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections.abc import Sequence
from pathlib import Path

from higher_index_ca import __version__
from higher_index_ca.algorithms import Algorithm
from higher_index_ca.arrayio import read_array, write_array
from higher_index_ca.config import (
    RunManifest,
    default_output_dir,
    ga_config_as_mapping,
    load_ga_config,
)
from higher_index_ca.core import CAParams
from higher_index_ca.errors import CoveringArrayError
from higher_index_ca.evolve import format_cost, run_ga, write_best_json, write_front_csv
from higher_index_ca.multistage import (
    DEFAULT_CACHE_SIZE,
    PrefixCache,
    StageSelection,
    TimeMode,
    execute,
    sweep_stats,
    write_sweep_csv,
)
from higher_index_ca.scaling import METRICS, estimate_growth
from higher_index_ca.verify import coverage_profile, is_covering_array, write_profile_csv

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_USAGE = 2


def _params(args: argparse.Namespace) -> CAParams:
    return CAParams(t=args.t, k=args.k, v=args.v, lam=args.lam)


def _stem(params: CAParams) -> str:
    return f"t{params.t}_k{params.k}_v{params.v}_l{params.lam}"


def cmd_construct(args: argparse.Namespace) -> int:
    params = _params(args)
    selection = StageSelection.parse(args.stages)
    selection.check(params)
    record = execute(selection, params, PrefixCache(args.cache_size))

    out = Path(args.out) if args.out else default_output_dir() / f"ca_{_stem(params)}.txt"
    write_array(out, record.array, params)
    record_path = out.with_name(f"{out.stem}.record.json")
    record_path.write_text(json.dumps(record.as_dict(), indent=2) + "\n", encoding="utf-8")
    RunManifest(
        command="construct",
        params=params,
        time_mode=args.time_mode,
        outputs=[str(out), str(record_path)],
        extra={"selection": str(selection)},
    ).write_beside(out)

    print(f"{'Stage':<8} | {'Rows':<8} | {'Index':<6} | {'Cost':<14}")
    print("-" * 44)
    for stage in record.per_stage:
        label = f"{stage.algorithm.value}:{stage.index}"
        print(f"{label:<8} | {stage.rows_added:<8} | {stage.cumulative_index:<6} | "
              f"{format_cost(stage.cost(args.time_mode)):<14}")
    print("-" * 44)
    print(f"N = {record.final_rows}, T = {format_cost(record.cost(args.time_mode))} "
          f"({args.time_mode}) -> {out}")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    params, array = read_array(args.file)
    ok, report = is_covering_array(array, params, args.lam, None if args.all else 100)
    print(report)
    return EXIT_OK if ok else EXIT_INVALID


def cmd_sweep(args: argparse.Namespace) -> int:
    params = _params(args)
    algorithms = args.algorithms.split(",")
    cache = PrefixCache(0 if args.no_cache else args.cache_size)
    report = sweep_stats(
        params,
        max_stages=args.max_stages,
        algorithms=algorithms,
        cache=cache,
        time_mode=args.time_mode,
        jobs=args.jobs,
    )
    out = Path(args.out) if args.out else default_output_dir() / f"sweep_{_stem(params)}.csv"
    write_sweep_csv(out, report.rows)
    stats = cache.stats()
    RunManifest(
        command="sweep",
        params=params,
        time_mode=args.time_mode,
        outputs=[str(out)],
        extra={"selections": len(report.records), "fresh_stage_runs": report.fresh_stage_runs,
               "cache_hits": stats.hits, "max_stages": args.max_stages or params.lam,
               "algorithms": algorithms},
    ).write_beside(out)

    print(f"{'NS':<4} | {'Min N':<7} | {'Max N':<7} | {'Avg N':<7} | {'Median N':<9} | "
          f"{'Stddev N':<9} | {'Min T':<12}")
    print("-" * 72)
    for row in report.rows:
        print(f"{row.ns:<4} | {row.min_n:<7} | {row.max_n:<7} | {row.avg_n:<7} | "
              f"{row.median_n:<9} | {row.stddev_n:<9} | {format_cost(row.min_t):<12}")
    best = report.best()
    print("-" * 72)
    print(f"{len(report.records)} selections, {report.fresh_stage_runs} fresh stage runs; "
          f"best N = {best.final_rows} ({best.selection}) -> {out}")
    return EXIT_OK


def cmd_search(args: argparse.Namespace) -> int:
    params = _params(args)
    config = load_ga_config(
        args.config,
        population_size=args.pop,
        generations=args.gens,
        seed=args.seed,
        time_mode=args.time_mode,
        jobs=args.jobs if args.jobs > 1 else None,
    )
    result = run_ga(params, config, PrefixCache(args.cache_size))

    out_dir = Path(args.out_dir or default_output_dir() / f"search_{_stem(params)}")
    front_path = write_front_csv(out_dir / "fronts.csv", result.fronts)
    best_path = write_best_json(out_dir / "best.json", result)
    RunManifest(
        command="search",
        params=params,
        seed=config.seed,
        time_mode=config.time_mode.value,
        outputs=[str(front_path), str(best_path)],
        extra={**ga_config_as_mapping(config), "evaluations": result.evaluations,
               "config": str(Path(args.config).resolve()) if args.config else None},
    ).write_beside(front_path)

    print(f"{'Gen':<5} | {'Lowest N':<24} | {'Lowest T':<24}")
    print("-" * 58)
    for entry in result.best():
        low_n, low_t = entry["lowest_n"], entry["lowest_t"]
        print(f"{entry['generation']:<5} | {low_n['n']:<5} {low_n['selection']:<18} | "
              f"{format_cost(low_t['t']):<10} {low_t['selection']:<13}")
    return EXIT_OK


def cmd_profile(args: argparse.Namespace) -> int:
    params, array = read_array(args.file)
    lam = args.lam or params.lam
    profile = coverage_profile(array, params, lam)
    out = Path(args.out or default_output_dir() / f"{Path(args.file).stem}.profile.csv")
    write_profile_csv(out, profile)
    RunManifest(command="profile", params=params.with_lambda(lam), outputs=[str(out)],
                extra={"source": str(args.file)}).write_beside(out)
    final = profile[-1].cumulative if profile else 0
    print(f"{len(profile)} rows, {final} interactions {lam}-covered -> {out}")
    return EXIT_OK


def cmd_scaling(args: argparse.Namespace) -> int:
    report = estimate_growth(args.alg, args.t, args.v, args.lam, args.k, args.time_mode,
                             args.metric)
    print(report)
    return EXIT_OK


def _add_params(parser: argparse.ArgumentParser, k: bool = True) -> None:
    parser.add_argument("--t", type=int, required=True, help="Strength")
    if k:
        parser.add_argument("--k", type=int, required=True, help="Number of factors")
    parser.add_argument("--v", type=int, required=True, help="Symbols per factor")
    parser.add_argument("--lambda", dest="lam", type=int, required=True, help="Target index")


def _add_time_mode(parser: argparse.ArgumentParser, default: str = TimeMode.WORK.value) -> None:
    parser.add_argument(
        "--time-mode", choices=[m.value for m in TimeMode], default=default,
        help="Cost measure: wall-clock seconds or deterministic work units",
    )


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="count", default=0,
                        help="-v for progress, -vv for debug detail")
    common.add_argument("--jobs", type=int, default=1, help="Parallel executions")
    common.add_argument("--cache-size", type=int, default=DEFAULT_CACHE_SIZE,
                        help="Prefix cache capacity (entries)")

    parser = argparse.ArgumentParser(
        prog="hica", description="Build and search higher-index covering arrays.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    construct = commands.add_parser("construct", parents=[common],
                                    help="Build an array from a stage selection")
    _add_params(construct)
    construct.add_argument("--stages", required=True, help='Selection such as "D:1,S:1,D:3"')
    construct.add_argument("--out", help="Array file to write")
    _add_time_mode(construct, TimeMode.WALL.value)
    construct.set_defaults(handler=cmd_construct)

    verify = commands.add_parser("verify", parents=[common], help="Certify an array file")
    verify.add_argument("--file", required=True)
    verify.add_argument("--lambda", dest="lam", type=int, help="Index to check (default: header)")
    verify.add_argument("--all", action="store_true", help="List every deficient interaction")
    verify.set_defaults(handler=cmd_verify)

    sweep = commands.add_parser("sweep", parents=[common],
                                help="Execute every selection up to a stage count")
    _add_params(sweep)
    sweep.add_argument("--max-stages", type=int, help="Default: lambda")
    sweep.add_argument("--algorithms", default=",".join(a.value for a in Algorithm))
    sweep.add_argument("--no-cache", action="store_true", help="Recompute every prefix")
    sweep.add_argument("--out", help="Statistics CSV to write")
    _add_time_mode(sweep)
    sweep.set_defaults(handler=cmd_sweep)

    search = commands.add_parser("search", parents=[common], help="Genetic search for selections")
    _add_params(search)
    search.add_argument("--pop", type=int, help="Population size (default 300)")
    search.add_argument("--gens", type=int, help="Generations (default 100)")
    search.add_argument("--seed", type=int)
    search.add_argument("--config", help="YAML file of GA settings")
    search.add_argument("--out-dir")
    search.add_argument("--time-mode", choices=[m.value for m in TimeMode])
    search.set_defaults(handler=cmd_search)

    profile = commands.add_parser("profile", parents=[common],
                                  help="Rows at which interactions become lambda-covered")
    profile.add_argument("--file", required=True)
    profile.add_argument("--lambda", dest="lam", type=int)
    profile.add_argument("--out")
    profile.set_defaults(handler=cmd_profile)

    scaling = commands.add_parser("scaling", parents=[common],
                                  help="Cost growth of one algorithm as k grows")
    scaling.add_argument("--alg", required=True, choices=[a.value for a in Algorithm])
    _add_params(scaling, k=False)
    scaling.add_argument("--k", type=int, nargs="+", required=True)
    scaling.add_argument("--metric", choices=list(METRICS), default="cost",
                         help="Fit total cost or graph edges visited")
    _add_time_mode(scaling)
    scaling.set_defaults(handler=cmd_scaling)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        return args.handler(args)
    except (CoveringArrayError, ValueError, OSError) as exc:
        print(f"hica {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
