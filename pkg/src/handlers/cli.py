"""
Command-line entry point: `subfn <command> [flags]`.
"""
import argparse
import json
import logging
import sys
from typing import Any, Callable, Dict, List, Optional

from pydantic import ValidationError

from handlers import bernstein, density, operators, verify
from handlers.common import EXIT_INVALID, EXIT_USAGE
from models.response import ErrorResponse
from models.run_config import Command, DensityMethod, RunConfig, SemigroupChoice, Suite
from models.semigroup import ExtensionPolicy
from utils.settings import settings

logger = logging.getLogger(__name__)

HANDLERS: Dict[Command, Callable[[RunConfig], Dict[str, Any]]] = {
    Command.BERNSTEIN_EVAL: bernstein.handler,
    Command.DENSITY: density.handler,
    Command.SUBORDINATE: operators.handler,
    Command.F_OF_A: operators.handler,
    Command.RESOLVENT: operators.handler,
    Command.VERIFY: verify.handler,
}


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument('--alpha', type=float, help='stable index in (0, 1)')
    shared.add_argument('--triplet', help='JSON file with a Levy triplet')
    shared.add_argument('--killing', type=float, help='killing rate a added to l**alpha')
    shared.add_argument('--lambda', dest='lambdas', type=float, action='append', help='evaluation point (repeatable)')
    shared.add_argument('--t', type=float, help='time')
    shared.add_argument('--s', dest='s_values', type=float, action='append', help='density point (repeatable)')
    shared.add_argument('--s-min', type=float)
    shared.add_argument('--s-max', type=float)
    shared.add_argument('--points', type=int)
    shared.add_argument('--method', choices=[method.value for method in DensityMethod])
    shared.add_argument('--semigroup', choices=[choice.value for choice in SemigroupChoice])
    shared.add_argument('--input', help='grid CSV (x,value or x,y,value)')
    shared.add_argument('--matrix', help='symmetric generator matrix CSV')
    shared.add_argument('--vector', help='vector CSV')
    shared.add_argument('--extension', choices=[policy.value for policy in ExtensionPolicy])
    shared.add_argument('--output', help='output file (stdout when omitted)')
    shared.add_argument('--panels', type=int)
    shared.add_argument('--nodes', type=int)
    shared.add_argument('--theta', type=float, help='contour angle in (pi/2, pi)')
    shared.add_argument('--contour-nodes', type=int)
    shared.add_argument('--r-factor', type=float)
    shared.add_argument('--atoms', type=int, help='atoms in the discretized subordinator')
    shared.add_argument('--tail', type=float, help='tail mass left out of the discretization')
    shared.add_argument('--suite', choices=[suite.value for suite in Suite])

    parser = argparse.ArgumentParser(prog='subfn', description='Subordination of operator semigroups')
    commands = parser.add_subparsers(dest='command', required=True)
    for command in Command:
        commands.add_parser(command.value, parents=[shared])
    return parser


def parse_config(argv: Optional[List[str]] = None) -> RunConfig:
    """Parse argv into a RunConfig; argparse exits with status 2 on malformed flags"""
    args = build_parser().parse_args(argv)
    values = {key: value for key, value in vars(args).items() if value is not None}
    return RunConfig(**values)


def main(argv: Optional[List[str]] = None) -> int:
    logging.basicConfig(
        level=settings.log_level.upper(),
        format='%(levelname)s %(name)s: %(message)s',
        stream=sys.stderr
    )
    try:
        config = parse_config(argv)
    except ValidationError as e:
        detail = '; '.join(error['msg'] for error in e.errors())
        # missing or conflicting flags are usage errors, out-of-range values are invalid input
        usage = all(error['type'] in ('missing', 'value_error') for error in e.errors())
        exit_code = EXIT_USAGE if usage else EXIT_INVALID
        logger.error(f"Rejected command line: {detail}")
        error = ErrorResponse(error='Usage error' if usage else 'Invalid input', detail=detail, exit_code=exit_code)
        print(json.dumps(error.model_dump()), file=sys.stderr)
        return exit_code

    logger.info(f"Running {config.command.value}")
    result = HANDLERS[config.command](config)
    body = result['body']
    if not body.get('success', False) and 'error' in body:
        print(json.dumps(body), file=sys.stderr)
    return result['exit_code']


if __name__ == '__main__':
    sys.exit(main())
