"""Command-line entry point.

    vdexplore <subcommand> [--config PATH] [--seeds 0,1,2] [--out DIR] [--jobs N]

Exit status: 0 on success, 1 if ``verify`` finds a failing check, 2 on a
configuration or I/O error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import experiments
from .config import ConfigError, ExperimentConfig, load_config
from .verify import run_verify

EXIT_OK, EXIT_VERIFY_FAILED, EXIT_CONFIG = 0, 1, 2

log = logging.getLogger("vdexplore")


def _seeds(text: str) -> list[int]:
    try:
        seeds = [int(s) for s in text.split(",") if s.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad seed list {text!r}") from exc
    if not seeds:
        raise argparse.ArgumentTypeError("seed list is empty")
    return seeds


def _floats(text: str) -> list[float]:
    try:
        return [float(s) for s in text.split(",") if s.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vdexplore", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON experiment config")
    common.add_argument("--seeds", type=_seeds, help="comma-separated seeds (overrides config)")
    common.add_argument("--out", type=Path, help="output directory (overrides config)")
    common.add_argument("--jobs", type=int, help="worker processes for seed runs")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("verify", parents=[common], help="check closed forms against numeric oracles")
    sub.add_parser("bandit", parents=[common], help="non-stationary bandit, all variants and seeds")
    conv = sub.add_parser("converge", parents=[common], help="learn w with the mean frozen")
    conv.add_argument("--d", type=float, help="distance from mean to reward interval")
    sweep = sub.add_parser("converge-sweep", parents=[common], help="converge over a list of d")
    sweep.add_argument("--d-list", type=_floats, help="comma-separated d values")
    sub.add_parser("mdp-sweep", parents=[common], help="monotonicity and HDR-bound tables")
    sub.add_parser("entropy", parents=[common], help="clipped entropy over a (mu, sigma) grid")
    return parser


def _apply_overrides(config: ExperimentConfig, args) -> ExperimentConfig:
    if args.seeds is not None:
        config.seeds = args.seeds
    if args.out is not None:
        config.out = str(args.out)
    if args.jobs is not None:
        config.jobs = args.jobs
    return config


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = _apply_overrides(load_config(args.config), args)
        out = Path(config.out)
        if args.command == "verify":
            report = out / "verify_report.txt"
            checks, ok = run_verify(report)
            failed = [c for c in checks if not c.passed]
            print(f"{len(checks) - len(failed)}/{len(checks)} checks passed; report: {report}")
            for c in failed:
                print(c.line())
            return EXIT_OK if ok else EXIT_VERIFY_FAILED
        if args.command == "bandit":
            paths = experiments.run_bandit(config, out)
        elif args.command == "converge":
            paths = (experiments.run_convergence(config, out, args.d),)
        elif args.command == "converge-sweep":
            paths = (experiments.run_convergence_sweep(config, out, args.d_list),)
        elif args.command == "mdp-sweep":
            paths = experiments.run_mdp_sweep(config, out)
        else:
            paths = (experiments.run_entropy_table(config, out),)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc.filename or ''}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for p in paths:
        print(p)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
