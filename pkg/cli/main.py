"""
cli/main.py - g2lab command-line entry point
G2 Variational Lab

Exit codes: 0 every verdict passed, 1 a verdict failed or a library error
was raised, 2 invalid usage.
"""

import argparse
import logging
import os
import sys
from typing import List, Optional

from dotenv import load_dotenv

from cli import commands
from cli.config import LOG_LEVEL_ENV, REPORT_DIR_ENV, load_config
from cli.report import Report, write_csv
from errors import ConfigError, G2LabError

logger = logging.getLogger('g2lab')

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def _nu(text: str):
    if text == 'auto':
        return text
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"nu must be 'auto' or a number, got {text!r}")


def _sign(text: str) -> str:
    if text not in ('+', '-'):
        raise argparse.ArgumentTypeError(f"sign must be + or -, got {text!r}")
    return text


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument('--config', help='TOML run configuration')
    common.add_argument('--log-level', help='DEBUG, INFO, WARNING or ERROR')
    common.add_argument('--out', help='write the JSON report here instead of stdout')
    common.add_argument('--csv', help='write the CSV series (if any) here')
    common.add_argument('--seed', type=int, help='Monte-Carlo seed')
    common.add_argument('--samples', type=int, help='Monte-Carlo sample count')
    common.add_argument('--method', choices=('moment-reduction', 'monte-carlo', 'radial-1d'),
                        help='quadrature method')

    parser = argparse.ArgumentParser(
        prog='g2lab',
        description='Numerical checks for the G2 and split-G2 Hitchin functionals.',
        parents=[common],
    )
    sub = parser.add_subparsers(dest='command', metavar='COMMAND')
    sub.required = True

    p = sub.add_parser('decompose', parents=[common], help='type decomposition of a form')
    p.add_argument('form', help="form literal, e.g. 'dx[1,2] + 2*dx[3,4]' or 'phi0'")
    p.add_argument('--structure', default='phi0', help='reference structure (phi0, phi0~, ...)')

    p = sub.add_parser('hessian', parents=[common], help='second variation of one family')
    p.add_argument('--family', required=True, help='P0+, P0-, SG3+, SG3-, SG4+, SG4- or CH-')
    p.add_argument('--eta', type=float, default=1.0)

    p = sub.add_parser('verify-lemma', parents=[common], help='sign checks for a lemma group')
    p.add_argument('lemma', choices=('p0', 'sg3', 'sg4', 'ch'))
    p.add_argument('--eta', type=float, default=1.0)

    p = sub.add_parser('unbounded', parents=[common], help='unboundedness iteration')
    p.add_argument('--sign', type=_sign, required=True)
    p.add_argument('--rounds', type=int)
    p.add_argument('--nu', type=_nu)
    p.add_argument('--packing')

    p = sub.add_parser('saddle', parents=[common], help='Gram matrix of disjoint bumps')
    p.add_argument('--k', type=int, default=5, help='number of disjoint bumps')
    p.add_argument('--sign', type=_sign, required=True)
    p.add_argument('--eta', type=float, default=1.0)

    p = sub.add_parser('coflow', parents=[common], help='Laplacian coflow on a flat torus')
    p.add_argument('--grid', type=int)
    p.add_argument('--s', type=float)
    p.add_argument('--dt', type=float)
    p.add_argument('--steps', type=int)

    p = sub.add_parser('hk-bound', parents=[common], help='volume bound on a flat ball')
    p.add_argument('--eta', type=float, default=1.0)

    p = sub.add_parser('glue', parents=[common], help='glue a closed 4-form to ψ0')
    p.add_argument('--epsilon', type=float, default=0.1)
    p.add_argument('--delta', type=float, default=1e-2)
    return parser


def _overrides(args) -> dict:
    keys = ('seed', 'samples', 'method')
    return {'quadrature': {key: getattr(args, key, None) for key in keys}}


def _dispatch(args, config: dict):
    if args.command == 'decompose':
        return commands.run_decompose(args.form, args.structure, config)
    if args.command == 'hessian':
        return commands.run_hessian(args.family, args.eta, config)
    if args.command == 'verify-lemma':
        return commands.run_verify_lemma(args.lemma, args.eta, config)
    if args.command == 'unbounded':
        return commands.run_unbounded(args.sign, config, args.rounds, args.nu, args.packing)
    if args.command == 'saddle':
        return commands.run_saddle(args.k, args.sign, args.eta, config)
    if args.command == 'coflow':
        return commands.run_coflow_command(config, args.grid, args.s, args.dt, args.steps)
    if args.command == 'hk-bound':
        return commands.run_hk_bound(args.eta, config)
    return commands.run_glue(args.epsilon, args.delta, config)


def _output_path(path: Optional[str]) -> Optional[str]:
    directory = os.environ.get(REPORT_DIR_ENV)
    if path and directory and not os.path.isabs(path):
        return os.path.join(directory, path)
    return path


def run(argv: Optional[List[str]] = None) -> int:
    load_dotenv()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    level = getattr(args, 'log_level', None) or os.environ.get(LOG_LEVEL_ENV) or 'WARNING'
    level = level.upper()
    if not isinstance(logging.getLevelName(level), int):
        parser.print_usage(sys.stderr)
        print(f"g2lab: error: unknown log level {level!r}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=level, format='%(asctime)s %(levelname)s %(name)s: %(message)s',
                        stream=sys.stderr)

    try:
        config = load_config(getattr(args, 'config', None), _overrides(args))
    except ConfigError as e:
        print(f"g2lab: error: {e}", file=sys.stderr)
        return EXIT_USAGE

    rows = None
    try:
        report, rows = _dispatch(args, config)
    except G2LabError as e:
        report = Report(args.command, {k: v for k, v in vars(args).items()
                                       if k not in ('command', 'config', 'out', 'csv')},
                        config)
        report.fail(e)
    except ValueError as e:
        print(f"g2lab: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    report.finish()

    out = _output_path(getattr(args, 'out', None))
    if out:
        report.write(out)
    else:
        print(report.dumps())
    csv_path = getattr(args, 'csv', None)
    if csv_path and rows is not None:
        write_csv(_output_path(csv_path), rows)

    logger.info(f"{args.command}: {'passed' if report.passed else 'failed'} "
                f"in {report.wall_time:.2f}s")
    return EXIT_OK if report.passed else EXIT_FAILED


if __name__ == '__main__':
    sys.exit(run())
