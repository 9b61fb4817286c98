"""Command-line entry point: python -m krein_layers <subcommand> --config <path>"""

import argparse
import logging
import os
from typing import List, Optional

from ..core.exceptions import ConfigError
from .commands import COMMANDS, EXIT_CONFIG_ERROR, run_command, write_error_report
from .config import load_config

logger = logging.getLogger(__name__)

DEFAULT_OUTPUT_DIR = "results"


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        description="Boundary-integral Krein resolvents for -Laplace + V0 with boundary and interface conditions"
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    descriptions = {
        "verify": "run the invariant suite and write verify_report.json",
        "eig": "scan the boundary block for eigenvalues",
        "green": "evaluate the perturbed Green's function on a box",
        "scatter": "compute the far field of a plane wave",
        "svd": "singular-value decay of the resolvent difference",
    }
    for name in COMMANDS:
        sub = subparsers.add_parser(name, help=descriptions[name])
        sub.add_argument("--config", required=True, help="Path to a JSON run configuration")
        sub.add_argument("--out", default=None, help="Output directory (overrides output.dir)")
        sub.add_argument("--verbose", action="store_true", help="Log at DEBUG level")
    return parser.parse_args(argv)


def main(argv: Optional[List[str]] = None) -> int:
    args = parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    try:
        config = load_config(args.config)
        if args.out is not None:
            config.output.dir = args.out
        if config.task.kind != args.command:
            raise ConfigError(f"Task kind '{config.task.kind}' does not match subcommand '{args.command}'",
                              key_path="task.kind")
    except ConfigError as exc:
        directory = args.out or DEFAULT_OUTPUT_DIR
        path = write_error_report(directory, EXIT_CONFIG_ERROR, exc)
        logger.error("Configuration error: %s (details in %s)", exc, path)
        return EXIT_CONFIG_ERROR

    logger.info("Running %s with outputs in %s", args.command, os.path.abspath(config.output.dir))
    return run_command(args.command, config)
