"""
Command-line entry point for capra-l0.

    python main.py norm --kind topk --k 2 --vec x.json
    python main.py conjugate --fn l0 --at y.json --engine grid --samples 4096 --seed 7
    python main.py verify --suite all --seed 42 --out report.json

Exit codes: 0 success, 1 failed checks, 2 usage or validation error,
3 file or parse error.
"""

import argparse
import sys
from typing import List, Optional

from src import __version__
from src.exceptions import CapraError, VectorFileError
from src.reporting.checks import SUITES
from src.reporting.commands import DEFAULT_GRID_SAMPLES, cmd_conjugate, cmd_norm, cmd_verify
from src.utils.logger import setup_logger

# Initialize logger
logger = setup_logger('main')

EXIT_OK = 0
EXIT_CHECKS_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3


def _dims(text: str) -> List[int]:
    try:
        dims = [int(part) for part in text.split(',') if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"--dims expects a comma separated list of integers, got {text!r}") from exc
    if not dims or any(d < 1 for d in dims):
        raise argparse.ArgumentTypeError(f"--dims must list dimensions >= 1, got {text!r}")
    return dims


def _non_negative(text: str) -> float:
    value = float(text)
    if not value >= 0:
        raise argparse.ArgumentTypeError(f"expected a value >= 0, got {text!r}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='capra',
        description='Capra conjugacy, top-k / k-support norms and the l0 pseudonorm',
    )
    parser.add_argument('--version', action='version', version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest='command', required=True)

    norm = subparsers.add_parser('norm', help='evaluate l0 or a norm at a vector')
    norm.add_argument('--kind', choices=['l0', 'topk', 'ksup', 'euclid'], required=True)
    norm.add_argument('--k', type=int, default=None)
    norm.add_argument('--vec', required=True, help='vector file (.json array or .txt)')
    norm.add_argument('--zero-tol', type=_non_negative, default=0.0)
    norm.set_defaults(handler=cmd_norm)

    conjugate = subparsers.add_parser('conjugate', help='Capra conjugate of l0 or of a level-set indicator')
    conjugate.add_argument('--fn', choices=['l0', 'levelset', 'biconj-l0'], required=True)
    conjugate.add_argument('--k', type=int, default=None)
    conjugate.add_argument('--at', required=True, help='point file (.json array or .txt)')
    conjugate.add_argument('--engine', choices=['closed', 'grid'], default='closed')
    conjugate.add_argument('--samples', type=int, default=DEFAULT_GRID_SAMPLES)
    conjugate.add_argument('--samples-from', default=None, help='primal sample set file for the grid engine')
    conjugate.add_argument('--samples-out', default=None, help='write the primal sample set used to this file')
    conjugate.add_argument('--seed', type=int, default=None)
    conjugate.add_argument('--lambda-max', type=float, default=None)
    conjugate.add_argument('--restarts', type=int, default=None)
    conjugate.add_argument('--config', default=None, help='TOML or JSON settings file')
    conjugate.set_defaults(handler=cmd_conjugate)

    verify = subparsers.add_parser('verify', help='run a verification suite and write a report')
    verify.add_argument('--suite', choices=list(SUITES) + ['all'], required=True)
    verify.add_argument('--seed', type=int, default=None)
    verify.add_argument('--out', default=None, help='report path (default results/verify_<suite>.json)')
    verify.add_argument('--dims', type=_dims, default=None, help='comma separated dimensions, e.g. 2,3,4')
    verify.add_argument('--workers', type=int, default=None)
    verify.add_argument('--lambda-max', type=float, default=None)
    verify.add_argument('--restarts', type=int, default=None)
    verify.add_argument('--xlsx', default=None, help='also export the check table to this Excel file')
    verify.add_argument('--config', default=None, help='TOML or JSON settings file')
    verify.set_defaults(handler=cmd_verify)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments, run the command and map errors to exit codes
    """
    parser = build_parser()
    args = parser.parse_args(argv)

    if getattr(args, 'samples', 1) < 1:
        parser.error('--samples must be >= 1')

    try:
        return args.handler(args)
    except VectorFileError as e:
        logger.error(f"I/O error: {str(e)}")
        return EXIT_IO
    except CapraError as e:
        logger.error(f"Invalid input: {str(e)}")
        return EXIT_USAGE
    except KeyboardInterrupt:
        logger.warning("Interrupted by user")
        return 130


if __name__ == "__main__":
    sys.exit(main())
