"""Command-line entry point.

    raqr <subcommand> --config PATH --out DIR --seed U64 [--check] [--workers N]

Exit status: 0 on success, 2 on a configuration error, 3 when ``--check``
finds a failing acceptance gate.
"""

from __future__ import annotations

import argparse
import sys

from .config import ConfigError, load_config
from .experiments import EXPERIMENTS, run_experiment

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_GATE = 3


def _u64(text):
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("workers must be >= 1")
    return value


def build_parser():
    p = argparse.ArgumentParser(prog="raqr", description="Rydberg receiver uplink experiments")
    p.add_argument("subcommand", choices=EXPERIMENTS)
    p.add_argument("--config", required=True, help="INI configuration file")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=_u64, default=0, help="unsigned 64-bit seed (default 0)")
    p.add_argument("--check", action="store_true", help="evaluate acceptance gates; exit 3 on failure")
    p.add_argument("--workers", type=_positive, default=1, help="worker processes for Monte-Carlo sweeps")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    report = run_experiment(args.subcommand, cfg, args.out, args.seed, args.workers, args.check)
    for criterion, passed, detail in report.checks:
        print(f"{'PASS' if passed else 'FAIL'} {criterion}: {detail}")
    if args.check and not report.passed:
        return EXIT_GATE
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
