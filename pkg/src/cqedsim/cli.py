"""Command-line interface.

    cqedsim <model> --config run.json [--out DIR] [--svg]
    cqedsim compare --config run.json [--out DIR] [--svg]
    cqedsim sweep --config sweep.json [--out DIR] [--jobs N]
    cqedsim --seed-config

Models: meanfield, fock, oracle, rwa. Exit codes: 0 success, 1 I/O error,
2 invalid configuration or usage, 3 numerical failure.
"""

import argparse
import sys

from .config import (MODELS, parse_config, parse_sweep_config,
                     seed_config_text)
from .errors import ConfigError
from .runner import (EXIT_CONFIG, EXIT_IO, compare_run, run, sweep_run)


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="cqedsim",
        description="Simulate a two-level atom coupled to one cavity mode.")
    parser.add_argument("--seed-config", action="store_true",
                        help="print a starter configuration and exit")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="JSON config path")
    common.add_argument("--out", default=None,
                        help="output directory (overrides output.dir)")
    common.add_argument("--svg", action="store_true", default=None,
                        help="emit SVG figures (overrides output.svg)")
    sub = parser.add_subparsers(dest="command")
    for model in MODELS:
        sub.add_parser(model, parents=[common],
                       help=f"run the {model} backend")
    sub.add_parser("compare", parents=[common],
                   help="run fock + oracle + rwa and report cross-deltas")
    sweep = sub.add_parser("sweep", parents=[common],
                           help="run a parameter grid")
    sweep.add_argument("--jobs", type=int, default=1,
                       help="concurrent grid points (default 1)")
    return parser


def _read_config(path):
    with open(path, "r", encoding="utf-8") as handle:
        return handle.read()


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.seed_config:
        sys.stdout.write(seed_config_text())
        return 0
    if args.command is None:
        parser.error("a subcommand is required (or use --seed-config)")

    try:
        text = _read_config(args.config)
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO

    try:
        if args.command == "sweep":
            result = sweep_run(parse_sweep_config(text), out_dir=args.out,
                               jobs=args.jobs)
        elif args.command == "compare":
            result = compare_run(parse_config(text, model="fock"),
                                 out_dir=args.out, svg=args.svg)
        else:
            result = run(parse_config(text, model=args.command),
                         out_dir=args.out, svg=args.svg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if result.status != 0:
        print(f"error: {result.message}", file=sys.stderr)
    else:
        for path in result.artifacts:
            print(path)
    return result.status


if __name__ == "__main__":
    sys.exit(main())
