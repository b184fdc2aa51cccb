"""
Command-line surface: global flags, subcommand dispatch and exit-code mapping.

Exit codes:
    0  success, all outputs written
    1  unexpected internal error
    2  usage or configuration error, empty input directory, too few frames
    3  unreadable or malformed input frame
    4  output could not be written
"""

import argparse
import logging
from typing import List, Optional

from ravden import __version__
from ravden.commands.command_factory import CommandFactory
from ravden.errors import (
    ConfigError,
    DimensionError,
    FormatError,
    OutputError,
    ParameterError,
    SequenceLengthError,
)
from ravden.settings import LOG_LEVELS, load_run_config

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_OUTPUT = 4

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def configure_logging(level: str = "INFO", log_file: Optional[str] = None) -> None:
    """Root logging setup for the process entry point"""
    handlers: List[logging.Handler] = [logging.StreamHandler()]
    if log_file:
        handlers.append(logging.FileHandler(log_file))
    logging.basicConfig(level=getattr(logging, level.upper()), format=LOG_FORMAT, handlers=handlers, force=True)


def build_parser(factory: Optional[CommandFactory] = None) -> argparse.ArgumentParser:
    factory = factory or CommandFactory()
    parser = argparse.ArgumentParser(prog="ravden", description="Multi-stage raw video denoising toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help="YAML, JSON or key = value config file")
    parser.add_argument("--threads", type=int, help="worker threads (default: RAVDEN_THREADS or 1)")
    parser.add_argument("--log-level", type=str.upper, choices=LOG_LEVELS)
    parser.add_argument("--log-file", help="also write logs to this file")
    parser.add_argument("--track", action="store_const", const=True, default=None,
                        help="log parameters and metrics to MLflow")

    subparsers = parser.add_subparsers(dest="command", metavar="command")
    subparsers.required = True
    factory.register_parsers(subparsers)
    return parser


def run(argv: Optional[List[str]] = None, setup_logging: bool = False) -> int:
    """Parse argv, run one subcommand and return its exit code"""
    factory = CommandFactory()
    parser = build_parser(factory)
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 0 for --help/--version and 2 for usage errors
        return int(e.code or 0)

    command_class = factory.get_command_class(args.command)
    try:
        overrides = {
            "threads": args.threads,
            "log_level": args.log_level,
            "mlops.enabled": args.track,
        }
        overrides.update(command_class.config_overrides(args))
        config = load_run_config(args.config, overrides)
    except ConfigError as e:
        if setup_logging:
            configure_logging(args.log_level or "INFO", args.log_file)
        logger.error(str(e))
        return EXIT_USAGE

    if setup_logging:
        configure_logging(config.log_level, args.log_file)

    command = factory.create_command(args.command, config)
    try:
        command.execute(args)
    except (ConfigError, SequenceLengthError, ParameterError) as e:
        logger.error(str(e))
        return EXIT_USAGE
    except (FormatError, DimensionError) as e:
        logger.error(str(e))
        return EXIT_INPUT
    except OutputError as e:
        logger.error(str(e))
        return EXIT_OUTPUT
    except Exception as e:
        logger.exception(f"Unexpected error in {args.command}: {e}")
        return EXIT_INTERNAL
    return EXIT_OK
