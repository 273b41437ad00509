"""Command line entry points.

Subcommands: ``sweep`` runs the configured cells and writes records.csv and
curves.csv; ``select`` runs the same cells and writes selection.csv;
``oracle`` replays the small-instance exact curve through the engine and
writes oracle.csv, exiting nonzero on disagreement; ``all`` does everything.
Every command echoes its configuration into run-manifest.json.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .config import RunConfig, load_config
from .oracle import lemma_check
from .runner import (
    DEFAULT_ORACLE_R,
    DEFAULT_ORACLE_TOL_SE,
    OracleComparison,
    compare_engine_to_oracle,
    run_sweep,
    write_oracle_output,
    write_selection_outputs,
    write_sweep_outputs,
)


def _add_run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="TOML config file (defaults apply without it)")
    parser.add_argument("--out", help="output directory (overrides config out_dir)")
    parser.add_argument("--seed", type=int, help="override master_seed")
    parser.add_argument("--split-seed", type=int, help="override split_seed")
    parser.add_argument("--r", type=int, help="override replications per cell")
    parser.add_argument("--workers", type=int, help="override worker process count")
    parser.add_argument(
        "--scenario", action="append", help="restrict to this scenario (repeatable)"
    )
    parser.add_argument(
        "--n", action="append", type=int, help="restrict to this sample size (repeatable)"
    )
    parser.add_argument("--quiet", action="store_true", help="suppress progress output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fsmsweep",
        description="Monte Carlo workbench for balance-gated randomization designs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("sweep", help="run all cells, write records.csv + curves.csv")
    _add_run_flags(sweep)
    sweep.set_defaults(func=cmd_sweep)

    select = sub.add_parser("select", help="run the sweep, write selection.csv")
    _add_run_flags(select)
    select.set_defaults(func=cmd_select)

    oracle = sub.add_parser(
        "oracle", help="validate the engine against the exact small-instance curve"
    )
    oracle.add_argument("--out", help="directory for oracle.csv (omit to skip writing)")
    oracle.add_argument(
        "--r", type=int, default=DEFAULT_ORACLE_R, help="Monte Carlo draws"
    )
    oracle.add_argument("--seed", type=int, default=20240801, help="assignment seed")
    oracle.add_argument(
        "--tol-se",
        type=float,
        default=DEFAULT_ORACLE_TOL_SE,
        help="tolerance in standard errors",
    )
    oracle.set_defaults(func=cmd_oracle)

    everything = sub.add_parser("all", help="sweep + select + oracle")
    _add_run_flags(everything)
    everything.add_argument(
        "--oracle-r",
        type=int,
        default=DEFAULT_ORACLE_R,
        help="Monte Carlo draws for the oracle check",
    )
    everything.set_defaults(func=cmd_all)
    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    config = load_config(args.config) if args.config else RunConfig()
    overrides = {}
    if args.out is not None:
        overrides["out_dir"] = args.out
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.split_seed is not None:
        overrides["split_seed"] = args.split_seed
    if args.r is not None:
        overrides["r"] = args.r
    if args.workers is not None:
        overrides["workers"] = args.workers
    if args.scenario:
        overrides["scenarios"] = tuple(args.scenario)
    if args.n:
        overrides["sample_sizes"] = tuple(args.n)
    return replace(config, **overrides) if overrides else config


def _print_warnings(result) -> None:
    for warning in result.warnings:
        print(f"warning: {warning}", file=sys.stderr)


def cmd_sweep(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    result = run_sweep(config, progress=not args.quiet)
    paths = write_sweep_outputs(result, config.out_dir)
    print(f"wrote {len(result.curves)} curve rows to {paths['curves']}")
    return 0


def cmd_select(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    result = run_sweep(config, progress=not args.quiet)
    paths = write_selection_outputs(result, config.out_dir)
    _print_warnings(result)
    print(f"wrote {len(result.selections)} selection rows to {paths['selection']}")
    return 0


def _report_oracle(comparison: OracleComparison, out: str | None) -> int:
    curve = comparison.curve
    live = [pt for pt in curve.points if pt.feasible]
    print(
        f"oracle instance: n={curve.n} p={curve.p}, "
        f"{len(live)} live thresholds, {comparison.r} engine draws"
    )
    for pt, mc in zip(curve.points, comparison.mc_rows):
        bits = [
            f"eps={pt.epsilon:<6g} exact p={pt.p_accept:.6f} mc p={mc['mc_p_accept']:.6f}"
        ]
        if "p_z" in mc:
            bits.append(f"z={mc['p_z']:+.2f}")
        if "mse_z" in mc:
            bits.append(f"mse z={mc['mse_z']:+.2f}")
        print("  " + "  ".join(bits))
    report = lemma_check(curve)
    print(f"p(eps) nondecreasing: {'PASS' if report.p_nondecreasing else 'FAIL'}")
    print(
        "diagnostics: conditional variance nonincreasing="
        f"{report.cond_var_nonincreasing}, "
        f"mse convexity violations={len(report.mse_convexity_violations)}"
    )
    if out:
        path = write_oracle_output(comparison, out)
        print(f"wrote {path}")
    if comparison.ok and report.p_nondecreasing:
        print(f"PASS: engine matches the exact curve within {comparison.tol_se:g} SE")
        return 0
    for failure in comparison.failures:
        print(f"FAIL: {failure}", file=sys.stderr)
    return 1


def cmd_oracle(args: argparse.Namespace) -> int:
    comparison = compare_engine_to_oracle(
        r=args.r, master_seed=args.seed, tol_se=args.tol_se
    )
    return _report_oracle(comparison, args.out)


def cmd_all(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    result = run_sweep(config, progress=not args.quiet)
    paths = write_sweep_outputs(result, config.out_dir)
    paths.update(write_selection_outputs(result, config.out_dir))
    _print_warnings(result)
    print(
        f"wrote {len(result.curves)} curve rows and {len(result.selections)} "
        f"selection rows to {paths['curves'].parent}"
    )
    comparison = compare_engine_to_oracle(r=args.oracle_r, master_seed=config.master_seed)
    return _report_oracle(comparison, config.out_dir)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
