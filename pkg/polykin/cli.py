"Command line surface: relax, transport1d, chu-compare and validate-closure."

import logging
from argparse import ArgumentParser, Namespace
from os import environ
from typing import List, Optional

from polykin.config import read_config
from polykin.run_all import STATUS_FAILURE, run
from polykin.util.constants import LOG_ENVIRONMENT_VARIABLE
from polykin.util.exceptions import ConfigError
from polykin.validate import print_closure_report, validate_closure_cmd


def _add_run_arguments(parser: ArgumentParser, transport: bool) -> None:
    parser.add_argument(
        '--config',
        type=str,
        help='Path to the run configuration.',
        required=True
    )
    parser.add_argument(
        '--out',
        type=str,
        help='Directory to write moments.csv, summary.json and state.h5 to.',
        default='out',
        required=False
    )
    parser.add_argument(
        '--strict-h',
        help='Stop at the first step that increases the entropy and exit with status 1.',
        action='store_true'
    )
    parser.add_argument(
        '--plot',
        help='Also plot the temperatures and the entropy to moments.png.',
        action='store_true'
    )
    if transport:
        parser.add_argument(
            '--threads',
            type=int,
            help='Worker threads for the per-cell relaxation (transport1d only).',
            default=1,
            required=False
        )
        parser.add_argument(
            '--second-order',
            help='Use minmod-limited second-order advection (transport1d only).',
            action='store_true'
        )


def parse_arguments(argv: Optional[List[str]] = None) -> Namespace:
    "Process command line arguments."
    parser = ArgumentParser(prog='polykin')
    subparsers = parser.add_subparsers(dest='command', required=True)
    _add_run_arguments(subparsers.add_parser(
        'relax', help='Space-homogeneous relaxation of the mixture.'), False)
    _add_run_arguments(subparsers.add_parser(
        'transport1d', help='Chu-reduced transport in one space dimension. The only mode that '
                       'takes --threads and --second-order.'), True)
    _add_run_arguments(subparsers.add_parser(
        'chu-compare', help='Relax the full and the reduced representation side by side.'), False)
    validate = subparsers.add_parser(
        'validate-closure', help='Sample the closure and report its admissibility.')
    validate.add_argument(
        '--config',
        type=str,
        help='Path to the run configuration.',
        required=True
    )
    validate.add_argument(
        '--samples',
        type=int,
        help='Number of random states to sample.',
        default=1000,
        required=False
    )
    return parser.parse_args(argv)


def configure_logging() -> None:
    "Log level from the environment; warnings go through logging."
    level = environ.get(LOG_ENVIRONMENT_VARIABLE, 'WARNING').upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format='%(asctime)s %(name)s %(levelname)s: %(message)s')
    logging.captureWarnings(True)


def main(argv: Optional[List[str]] = None) -> int:
    args = parse_arguments(argv)
    configure_logging()
    try:
        config = read_config(args.config, check_closure=args.command != 'validate-closure')
    except ConfigError as error:
        print(error)
        return STATUS_FAILURE
    if args.command == 'validate-closure':
        print_closure_report(validate_closure_cmd(config, args.samples))
        return 0
    return run(config,
               args.command,
               args.out,
               getattr(args, 'threads', 1),
               getattr(args, 'second_order', False),
               args.strict_h,
               args.plot)
