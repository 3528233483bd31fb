"""
Brute-force Oracle Module
Independent reference implementations used to validate the closed forms

Nothing here reuses the norm code of src.core.vectors_norms: subsets are
enumerated explicitly and the top-k unit ball is encoded as the
intersection of the cylinders {y : ||y_K|| <= 1}, |K| = k.
"""

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import numpy.typing as npt
from scipy.optimize import minimize

from src.core.vectors_norms import SupportSet, as_vector, euclidean_norm, ksupport_norm, level_set_contains
from src.exceptions import DimensionGuardError, NotOnSphereError, OrderOutOfRangeError
from src.utils.logger import setup_logger

logger = setup_logger(__name__)

TOPK_GUARD = 20
DUAL_GUARD = 6
TIE_RULE = 'lexicographic-first'


@dataclass
class OracleResult:
    """
    Value found by an oracle together with what attains it.

    witness is a SupportSet (subset enumeration), a vector (maximization)
    or None; evaluations counts objective evaluations.
    """

    value: Any
    witness: Any
    evaluations: int
    tie_rule: str = TIE_RULE
    details: Dict[str, Any] = field(default_factory=dict)


def _subset_norm(x: np.ndarray, subset: Tuple[int, ...]) -> float:
    return euclidean_norm([x[i] for i in subset])


def topk_norm_bruteforce(x: npt.ArrayLike, k: int) -> OracleResult:
    """
    max of ||x_K|| over all subsets with |K| = k, by enumeration

    Subsets are visited in lexicographic order; the first maximizer wins.

    Args:
        x: Vector, d <= 20
        k: 0 <= k <= d

    Returns:
        OracleResult with a SupportSet witness
    """
    x = as_vector(x)
    d = x.shape[0]
    if d > TOPK_GUARD:
        raise DimensionGuardError(f"Subset enumeration limited to d <= {TOPK_GUARD}, got {d}")
    if not 0 <= k <= d:
        raise OrderOutOfRangeError(f"k={k} outside 0..{d}")

    best_value = -math.inf
    best_subset: Tuple[int, ...] = ()
    evaluations = 0
    for subset in combinations(range(d), k):
        evaluations += 1
        value = _subset_norm(x, subset)
        if value > best_value:
            best_value, best_subset = value, subset

    return OracleResult(
        value=best_value,
        witness=SupportSet.of(d, best_subset),
        evaluations=evaluations,
    )


def _cylinder_constraints(d: int, k: int) -> List[Dict[str, Any]]:
    constraints = []
    for subset in combinations(range(d), k):
        idx = list(subset)

        def fun(y, idx=idx):
            return 1.0 - float(np.dot(y[idx], y[idx]))

        def jac(y, idx=idx):
            grad = np.zeros_like(y)
            grad[idx] = -2.0 * y[idx]
            return grad

        constraints.append({'type': 'ineq', 'fun': fun, 'jac': jac})
    return constraints


def _largest_subset_norm(y: np.ndarray, k: int) -> float:
    return max(_subset_norm(y, subset) for subset in combinations(range(y.shape[0]), k))


def dual_norm_bruteforce(
    x: npt.ArrayLike,
    k: int,
    budget: int = 8,
    seed: int = 0
) -> OracleResult:
    """
    sup <x, y> over {||y||_(k) <= 1}, i.e. the k-support norm of x

    Route (a) enumerates the atoms B_K, |K| = k, where the optimum is
    ||x_K||; this is a lower bound. Route (b) runs constrained ascent (SLSQP
    on the cylinder intersection) from `budget` seeded starts, each result
    rescaled into the ball. The larger of the two is returned.

    Args:
        x: Vector, d <= 6
        k: 1 <= k <= d
        budget: Number of ascent starts
        seed: Seed for the random starts

    Returns:
        OracleResult with a maximizing vector as witness; details hold the
        value of each route
    """
    x = as_vector(x)
    d = x.shape[0]
    if d > DUAL_GUARD:
        raise DimensionGuardError(f"Dual-norm oracle limited to d <= {DUAL_GUARD}, got {d}")
    if not 1 <= k <= d:
        raise OrderOutOfRangeError(f"k={k} outside 1..{d}")

    # Route (a): atoms
    atoms = topk_norm_bruteforce(x, k)
    route_a = atoms.value
    evaluations = atoms.evaluations
    atom_witness = np.zeros(d)
    if route_a > 0:
        idx = list(atoms.witness.indices)
        atom_witness[idx] = x[idx] / route_a

    # Route (b): constrained ascent from seeded starts
    rng = np.random.default_rng(seed)
    constraints = _cylinder_constraints(d, k)
    starts = [np.sign(x) / math.sqrt(k), atom_witness]
    starts += [rng.standard_normal(d) for _ in range(max(0, budget - len(starts)))]

    route_b = -math.inf
    ascent_witness = atom_witness
    for start in starts[:max(budget, 1)]:
        start = start / max(1.0, _largest_subset_norm(start, k))
        result = minimize(
            lambda y: -float(np.dot(x, y)),
            start,
            jac=lambda y: -np.asarray(x),
            constraints=constraints,
            method='SLSQP',
            options={'maxiter': 300, 'ftol': 1e-15},
        )
        evaluations += int(result.nfev)
        y = np.asarray(result.x, dtype=float)
        y = y / max(1.0, _largest_subset_norm(y, k))
        value = float(np.dot(x, y))
        if value > route_b:
            route_b, ascent_witness = value, y

    if route_b > route_a:
        value, witness = route_b, ascent_witness
    else:
        value, witness = route_a, atom_witness

    logger.debug(f"dual_norm_bruteforce d={d} k={k}: route_a={route_a:.12g} route_b={route_b:.12g}")
    return OracleResult(
        value=value,
        witness=witness,
        evaluations=evaluations,
        details={'route_a': route_a, 'route_b': route_b},
    )


def support_function_ball_K_sampled(
    y: npt.ArrayLike,
    K: SupportSet,
    n_samples: int = 2048,
    seed: int = 0
) -> OracleResult:
    """Sampled sup of <x, y> over B_K (random directions plus the aligned point)."""
    y = as_vector(y)
    d = y.shape[0]
    idx = list(K.indices)
    rng = np.random.default_rng(seed)
    best, witness = 0.0, np.zeros(d)
    if not idx:
        return OracleResult(value=0.0, witness=witness, evaluations=0)

    candidates = np.zeros((n_samples + 1, d))
    candidates[:n_samples, idx] = rng.standard_normal((n_samples, len(idx)))
    candidates[n_samples, idx] = y[idx]
    for row in candidates:
        norm = math.sqrt(math.fsum(float(v) * float(v) for v in row))
        if norm == 0.0:
            continue
        point = row / norm
        value = float(np.dot(point, y))
        if value > best:
            best, witness = value, point
    return OracleResult(value=best, witness=witness, evaluations=n_samples + 1)


def hull_membership_sampled(
    x: npt.ArrayLike,
    k: int,
    n_samples: int = 512,
    seed: int = 0,
    tol: float = 1e-9
) -> OracleResult:
    """
    Membership of a unit vector in the k-support unit ball

    Tests ksupport_norm(x, k) <= 1 + tol and cross-checks against the l0
    level set (on the sphere both sets coincide). Sampled directions y are
    also tried as separating hyperplanes <x, y> > ||y||_(k).

    Args:
        x: Unit vector, d <= 6
        k: 1 <= k <= d
        n_samples: Number of sampled separating directions
        seed: Seed for the directions
        tol: Tolerance of the unit-norm and membership tests

    Returns:
        OracleResult whose value is the membership boolean; details carry
        each individual test and whether they agree
    """
    x = as_vector(x)
    d = x.shape[0]
    if d > DUAL_GUARD:
        raise DimensionGuardError(f"Hull oracle limited to d <= {DUAL_GUARD}, got {d}")
    norm = euclidean_norm(x)
    if abs(norm - 1.0) > max(tol, 1e-9):
        raise NotOnSphereError(f"||x|| = {norm!r} is not 1")

    in_ball = ksupport_norm(x, k) <= 1.0 + tol
    in_level_set = level_set_contains(x, k)

    rng = np.random.default_rng(seed)
    separator: Optional[np.ndarray] = None
    for _ in range(n_samples):
        y = rng.standard_normal(d)
        if float(np.dot(x, y)) > _largest_subset_norm(y, k) * (1.0 + tol):
            separator = y
            break

    consistent = (in_ball == in_level_set) and not (in_ball and separator is not None)
    if not consistent:
        logger.warning(
            f"Hull membership tests disagree for d={d}, k={k}: "
            f"ball={in_ball}, level_set={in_level_set}, separated={separator is not None}"
        )
    return OracleResult(
        value=in_ball,
        witness=separator,
        evaluations=n_samples,
        details={
            'in_ksupport_ball': in_ball,
            'in_level_set': in_level_set,
            'separated_by_sample': separator is not None,
            'consistent': consistent,
        },
    )
