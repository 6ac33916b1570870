#!/usr/bin/env python3
"""
Subflow - Point d'entrée principal

    python run_subflow.py resolvent --config cfg.json [--set key=value ...] [--out DIR] [--seed N]
    python run_subflow.py evolve    --config cfg.json [--plot]
    python run_subflow.py verify    contraction|homogeneity|convexity|oracle|boundary|parabolic|shifted_truncation|all
"""
import argparse
import logging
import sys
from pathlib import Path

from config.settings import LOG_FILENAME, LOG_FORMAT, LOG_LEVEL, OUTPUT_DIR
from src.cli.commands import cmd_evolve, cmd_resolvent, cmd_verify


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='run_subflow',
        description="Implicit-Euler solver and verification harness for doubly nonlinear p-Laplacian flows",
    )

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help='JSON run configuration')
    common.add_argument('--set', dest='overrides', action='append', default=[], metavar='KEY=VALUE',
                        help='dotted-path override, may be repeated (value parsed as JSON when possible)')
    common.add_argument('--out', help='output directory')
    common.add_argument('--seed', type=int, help='seed for random profiles and verify suites')
    common.add_argument('--plot', action='store_true', help='write norms.svg (evolve)')

    sub = parser.add_subparsers(dest='command', required=True)
    sub.add_parser('resolvent', parents=[common], help='solve one resolvent step')
    sub.add_parser('evolve', parents=[common], help='run the time stepper')
    verify = sub.add_parser('verify', parents=[common], help='run a verification suite')
    verify.add_argument('suite', help='suite name or "all"')
    return parser


def setup_logging(out_dir: str) -> None:
    Path(out_dir).mkdir(parents=True, exist_ok=True)
    logging.basicConfig(
        level=getattr(logging, LOG_LEVEL.upper(), logging.INFO),
        format=LOG_FORMAT,
        handlers=[
            logging.FileHandler(Path(out_dir) / LOG_FILENAME),
            logging.StreamHandler(),
        ],
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.out or OUTPUT_DIR)

    if args.command == 'resolvent':
        return cmd_resolvent(args.config, args.overrides, args.out, args.seed, args.plot)
    if args.command == 'evolve':
        return cmd_evolve(args.config, args.overrides, args.out, args.seed, args.plot)
    return cmd_verify(args.suite, args.config, args.overrides, args.out, args.seed, args.plot)


if __name__ == "__main__":
    sys.exit(main())
