"""
Command Module
Implements the norm, conjugate and verify commands behind main.py

Each command returns a process exit code; results go to stdout as JSON,
logs go to stderr.
"""

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Dict, Optional, TextIO

import numpy as np

from src.closed_form.capra_l0 import (
    biconj_l0,
    build_conjugate_report,
    conj_l0,
    conj_levelset_indicator,
)
from src.config import RESULTS_DIR, resolve_settings
from src.core.vectors_norms import euclidean_norm, ksupport_norm, l0, level_set_contains, topk_norm
from src.exceptions import CapraError, ConfigError
from src.reporting.checks import checks_for_suite, run_checks
from src.reporting.report import json_safe, build_report, export_report_to_excel, write_report
from src.sampled.conjugacy_engine import SampledFunction, capra_coupling, conjugate_values
from src.sampled.sample_sets import level_set_samples
from src.utils.input_validator import validate_order, validate_sample_set, validate_vector
from src.utils.logger import setup_logger
from src.utils.vector_io import load_sample_set, load_vector, save_sample_set

logger = setup_logger(__name__)

DEFAULT_GRID_SAMPLES = 4096


def _emit(payload: Dict[str, Any], stream: Optional[TextIO] = None) -> None:
    stream = stream or sys.stdout
    stream.write(json.dumps(json_safe(payload)) + '\n')


def _raise_if_invalid(results: Dict[str, Any]) -> None:
    for warning in results['warnings']:
        logger.warning(warning)
    if not results['is_valid']:
        raise ConfigError('; '.join(results['errors']))


def _load_point(path: str, zero_tol: float = 0.0) -> np.ndarray:
    x = load_vector(path)
    _raise_if_invalid(validate_vector(x, zero_tol))
    return x


def cmd_norm(args: argparse.Namespace) -> int:
    """
    Evaluate l0, the top-k norm, the k-support norm or the Euclidean norm

    Prints {"kind": ..., "k": ..., "value": ...}.
    """
    x = _load_point(args.vec, args.zero_tol)
    d = x.shape[0]
    k = args.k

    if args.kind == 'l0':
        value, k = l0(x, args.zero_tol), None
    elif args.kind == 'euclid':
        value, k = euclidean_norm(x), None
    elif args.kind == 'topk':
        _raise_if_invalid(validate_order(k, d, lowest=0, kind='topk'))
        value = topk_norm(x, k)
    else:
        _raise_if_invalid(validate_order(k, d, lowest=1, kind='ksup'))
        value = ksupport_norm(x, k)

    logger.debug(f"norm {args.kind} k={k} on R^{d}: {value!r}")
    _emit({'kind': args.kind, 'k': k, 'value': value})
    return 0


def _grid_samples(args: argparse.Namespace, d: int, level: int, seed: int) -> np.ndarray:
    if args.samples_from:
        points = load_sample_set(args.samples_from)
        _raise_if_invalid(validate_sample_set(points, dim=d))
    else:
        points = level_set_samples(d, level, n=args.samples, seed=seed)
    if args.samples_out:
        save_sample_set(points, args.samples_out)
    return points


def cmd_conjugate(args: argparse.Namespace) -> int:
    """
    Capra conjugate of l0 or of a level-set indicator at a point, or the
    biconjugate of l0

    The closed form is always computed. With --engine grid the sampled
    engine is run on a level-set sample of the requested size and the gap is
    reported; for biconj-l0 the ray/restart search plays that role.
    """
    settings = resolve_settings(
        Path(args.config) if args.config else None,
        {'seed': args.seed, 'lambda_max': args.lambda_max, 'restarts': args.restarts},
    )
    y = _load_point(args.at, settings['zero_tol'])
    d = y.shape[0]
    seed = int(settings['seed'])

    grid = None
    samples = 0
    if args.fn == 'levelset':
        _raise_if_invalid(validate_order(args.k, d, lowest=0, kind='levelset'))
        closed = conj_levelset_indicator(y, args.k)
        if args.engine == 'grid':
            points = _grid_samples(args, d, args.k, seed)
            mask = np.array([level_set_contains(p, args.k, settings['rel_tol']) for p in points])
            f = SampledFunction(points, np.where(mask, 0.0, np.inf))
            grid = float(conjugate_values(f, capra_coupling(), y)[0])
            samples = len(f)
    elif args.fn == 'l0':
        closed = conj_l0(y)
        if args.engine == 'grid':
            points = _grid_samples(args, d, d, seed)
            f = SampledFunction.from_callable(points, lambda p: l0(p, settings['zero_tol']))
            grid = float(conjugate_values(f, capra_coupling(), y)[0])
            samples = len(f)
    else:
        closed = float(l0(y, settings['zero_tol']))
        grid = biconj_l0(
            y,
            lambda_max=settings['lambda_max'],
            restarts=settings['restarts'],
            seed=seed,
            workers=settings['workers'],
        )
        samples = settings['restarts']

    report = build_conjugate_report(
        y,
        args.fn,
        closed_form=closed,
        oracle=grid,
        k=args.k if args.fn == 'levelset' else None,
        samples=samples,
        tie_rel_gap=settings['tie_rel_gap'],
        lambda_max=settings['lambda_max'],
    )
    if grid is not None and args.fn != 'biconj-l0' and grid > closed + 1e-12 * max(1.0, abs(closed)):
        logger.warning(f"Grid value {grid!r} exceeds the closed form {closed!r}")

    payload = report.to_dict()
    payload.update({'engine': args.engine, 'seed': seed, 'value': closed})
    _emit(payload)
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    """
    Run a verification suite and write its report

    Returns 0 when every check passed and 1 otherwise; the report is
    written in both cases.
    """
    settings = resolve_settings(
        Path(args.config) if args.config else None,
        {
            'seed': args.seed,
            'dims': args.dims,
            'workers': args.workers,
            'lambda_max': args.lambda_max,
            'theorem_restarts': args.restarts,
        },
    )
    checks = checks_for_suite(args.suite)
    logger.info("=" * 80)
    logger.info(f"VERIFYING SUITE '{args.suite}' ({len(checks)} checks, seed {settings['seed']})")
    logger.info("=" * 80)

    try:
        results = run_checks(checks, settings)
    except CapraError as e:
        logger.error(f"Suite '{args.suite}' aborted: {str(e)}", exc_info=True)
        raise

    report = build_report(args.suite, settings, results)
    output_file = Path(args.out) if args.out else RESULTS_DIR / f"verify_{args.suite}.json"
    write_report(report, output_file)
    if args.xlsx:
        export_report_to_excel(report, args.xlsx)

    for check in report.checks:
        if check.status != 'pass':
            logger.error(f"{check.check_id}: {check.status} (worst gap {check.worst_gap!r}) {check.message}")
    return 0 if report.passed else 1
