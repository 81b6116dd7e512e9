"""Command-line front-end.

Exit codes: 0 success, 2 configuration error (also argparse usage
errors), 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .config import (
    PRESET_NAMES,
    ConfigError,
    ExperimentConfig,
    load_config,
    parse_config,
    preset_config,
)
from .experiments import cmd_capacity, cmd_dist, cmd_outage, cmd_sweep_m

_COMMANDS = {
    "dist": cmd_dist,
    "outage": cmd_outage,
    "capacity": cmd_capacity,
    "sweep-m": cmd_sweep_m,
}

_EXIT_OK = 0
_EXIT_CONFIG = 2
_EXIT_NUMERICAL = 3


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group()
    source.add_argument("--config", metavar="PATH", help="JSON configuration file")
    source.add_argument(
        "--preset", choices=PRESET_NAMES, help="named built-in configuration"
    )
    parser.add_argument("--seed", type=int, help="override the config seed")
    parser.add_argument("--trials", type=int, help="override the config trial count")
    parser.add_argument("--out", metavar="PATH", help="override the output path")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="frislink",
        description="Reflecting-surface link experiments: analytical curves and "
        "reproducible Monte Carlo.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "dist": "equivalent-gain distribution curves for a static mode",
        "outage": "outage probability versus SNR for each mode",
        "capacity": "ergodic capacity versus SNR for each mode",
        "sweep-m": "capacity versus grid density at fixed aperture",
        "validate": "check a configuration and print its summary",
    }
    for name, text in helps.items():
        _add_common_flags(sub.add_parser(name, help=text))
    return parser


def _resolve_config(args) -> ExperimentConfig:
    if args.config is None and args.preset is None:
        raise ConfigError("either --config or --preset is required")
    if args.preset is not None:
        doc = preset_config(args.preset)
        if args.seed is not None:
            doc["seed"] = args.seed
        if args.trials is not None:
            doc["trials"] = args.trials
        if args.out is not None:
            doc["output_path"] = args.out
        return parse_config(json.dumps(doc))
    config = load_config(args.config)
    if args.seed is None and args.trials is None and args.out is None:
        return config
    doc = dict(config.canonical)
    if args.seed is not None:
        doc["seed"] = args.seed
    if args.trials is not None:
        doc["trials"] = args.trials
    if args.out is not None:
        doc["output_path"] = args.out
    return parse_config(json.dumps(doc))


def _summary_lines(config: ExperimentConfig) -> list:
    g = config.geometry
    return [
        f"config_hash: {config.config_hash}",
        f"geometry: {g.m_x}x{g.m_z} elements over {g.w_x}x{g.w_z} wavelengths",
        f"wavelength_m: {g.wavelength:.6g}",
        f"kernel: {config.kernel}",
        f"modes: {', '.join(spec.label for spec in config.modes)}",
        f"snr_grid_db: {list(config.snr_grid_db)}",
        f"trials: {config.trials}",
        f"seed: {config.seed}",
    ]


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = _resolve_config(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return _EXIT_CONFIG
    if args.command == "validate":
        for line in _summary_lines(config):
            print(line)
        return _EXIT_OK
    out_path = config.output_path or f"{args.command}.csv"
    runner = _COMMANDS[args.command]
    try:
        written = runner(config, out_path)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return _EXIT_CONFIG
    except (
        np.linalg.LinAlgError,
        FloatingPointError,
        ArithmeticError,
        OverflowError,
    ) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return _EXIT_NUMERICAL
    print(written)
    return _EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
