"""Command-line entry point: ``fluxsim <scenario> --config <path> --out <dir>``."""

from __future__ import annotations

import argparse
import sys

from .config import ConfigError, default_config, dump_default_config, parse_config
from .propagate import NumericalFailure
from .scenarios import RUNNERS

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fluxsim",
        description="Flux-qubit simulations: damped interference of a single "
        "qubit against a discretized continuum, and a four-qubit annealer "
        "with optional phonon and continuum couplings.",
    )
    parser.add_argument("--dump-default-config", action="store_true",
                        help="print the annotated default configuration and exit")
    sub = parser.add_subparsers(dest="scenario", metavar="scenario")
    for name in RUNNERS:
        p = sub.add_parser(name, help=f"run the {name} scenario")
        p.add_argument("--config", help="path to a key = value configuration file")
        p.add_argument("--out", help="output directory (default: $FLUXSIM_OUT or ./out)")
        p.add_argument("--override", action="append", default=[], metavar="KEY=VALUE",
                       help="override a single configuration value (repeatable)")
    return parser


def _parse_overrides(pairs):
    overrides = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep or not key:
            raise ConfigError(f"override must look like key=value, got {pair!r}")
        overrides[key.strip()] = value.strip()
    return overrides


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.dump_default_config:
        sys.stdout.write(dump_default_config())
        return EXIT_OK
    if args.scenario is None:
        parser.print_help(sys.stderr)
        return EXIT_CONFIG

    try:
        cfg = parse_config(args.config) if args.config else default_config()
        cfg = cfg.with_overrides(_parse_overrides(args.override))
    except ConfigError as exc:
        print(f"fluxsim: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        run = RUNNERS[args.scenario]
        out = run(cfg, out_dir=args.out)
    except NumericalFailure as exc:
        print(f"fluxsim: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    summary = out["summary"]
    for key in ("min_gap_ghz", "success_probability", "min_suppression_margin",
                "norm_drift"):
        if key in summary:
            print(f"{key} = {summary[key]:.6g}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
