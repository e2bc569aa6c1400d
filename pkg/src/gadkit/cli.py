"""Batch command-line entry point.

Usage::

    gadkit --config path/to/run.cfg [--out DIR] [--seed N] [--threads K]
           [--full-scale]

The config file names the experiment and all its parameters; the flags
override the output directory, replace the seed list with a single seed,
set the sweep worker-pool width, and raise sweep dimensions to the
reference scale.  Exit status 0 on success, 2 on a config problem.
"""

from __future__ import annotations

import argparse
import sys

from .config import parse_config
from .errors import ConfigError, GadkitError
from .experiments import run_config


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gadkit",
        description="Run a configured risk-anatomy experiment and write CSV/JSON artifacts.",
    )
    parser.add_argument("--config", required=True, help="path to the run configuration file")
    parser.add_argument("--out", default=None, help="output directory (overrides the config)")
    parser.add_argument("--seed", type=int, default=None,
                        help="replace the config's seed list with this single seed")
    parser.add_argument("--threads", type=int, default=None,
                        help="parallel sweep width (overrides the config)")
    parser.add_argument("--full-scale", action="store_true",
                        help="raise sweep dimensions to the reference scale")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = parse_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        paths = run_config(
            config,
            out_dir=args.out,
            seed_override=args.seed,
            threads=args.threads,
            full_scale=args.full_scale,
        )
    except GadkitError as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return 1
    for path in paths:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
