"""
Capra l0 Module
Closed-form Capra conjugates and biconjugates of the l0 pseudonorm and of
its level-set indicators, and the ray construction phi(lambda)

The conjugate side is exact (top-k norms). The biconjugate of l0 has no
finite formula for the sup over y, so it is searched numerically: the ray
family y = lambda * x first, then seeded random restarts with coordinate
ascent. Every candidate is a true value of the objective, so the search
result never exceeds l0(x) beyond rounding.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
import numpy.typing as npt

from src.config import SOLVER_DEFAULTS
from src.core.extended_real import POS_INF, ZERO, XReal, to_json
from src.core.vectors_norms import (
    Vector,
    as_vector,
    euclidean_norm,
    l0,
    level_set_contains,
    normalization,
    topk_norm,
    topk_norms_all,
)
from src.exceptions import CapraError, NotOnSphereError
from src.sampled.sample_sets import geometric_ladder
from src.utils.logger import setup_logger

logger = setup_logger(__name__)

SPHERE_TOL = 1e-9
MAX_SWEEPS = 50
# improvements below this multiple of eps * ||y||_1 are rounding noise
NOISE_FACTOR = 8.0 * np.finfo(float).eps


def conj_levelset_indicator(y: npt.ArrayLike, k: int) -> float:
    """
    Capra conjugate of the characteristic function of {l0 <= k}

    Equal to ||y||_(k) for both couplings Capra and -Capra (the level set is
    symmetric), with ||.||_(0) = 0.
    """
    return topk_norm(y, k)


def biconj_levelset_indicator(x: npt.ArrayLike, k: int, rel_tol: float = SOLVER_DEFAULTS['rel_tol']) -> XReal:
    """0 on the level set {l0 <= k}, +inf outside."""
    return ZERO if level_set_contains(x, k, rel_tol) else POS_INF


def _conj_from_chain(chain: Sequence[float], scale: float = 1.0) -> float:
    # max over l of scale * ||x||_(l) - l; the l = 0 term is 0
    return max(scale * value - l for l, value in enumerate(chain))


def conj_l0(y: npt.ArrayLike) -> float:
    """
    Capra conjugate of l0

    max over l in 0..d of ||y||_(l) - l. Always finite and >= 0.
    """
    return _conj_from_chain(topk_norms_all(y))


def fenchel_conj_l0(y: npt.ArrayLike) -> XReal:
    """Fenchel conjugate of l0: the characteristic function of {0}."""
    y = as_vector(y)
    return ZERO if not y.any() else POS_INF


def fenchel_biconj_l0(x: npt.ArrayLike) -> XReal:
    """Fenchel biconjugate of l0, identically 0."""
    as_vector(x)
    return ZERO


def _check_ray(x: Vector, lam: float) -> None:
    if not x.any():
        raise CapraError("phi(lambda) needs x != 0")
    if not lam > 0:
        raise CapraError(f"phi(lambda) needs lambda > 0, got {lam}")


def phi_ray(x: npt.ArrayLike, lam: float) -> float:
    """
    Value of the biconjugate objective at y = lambda * x

    phi(lambda) = lambda ||x|| - max(0, max_j (lambda ||x||_(j) - j)).
    Nondecreasing in lambda with limit l0(x).

    Args:
        x: Nonzero vector
        lam: lambda > 0

    Returns:
        phi(lambda)
    """
    x = as_vector(x)
    _check_ray(x, lam)
    chain = topk_norms_all(x)
    return lam * chain[-1] - _conj_from_chain(chain, lam)


def phi_ray_rewritten(x: npt.ArrayLike, lam: float) -> float:
    """
    phi(lambda) in its min form, with l = l0(x):

    min{ lambda ||x||_(l), min_{1 <= j < l} lambda (||x||_(l) - ||x||_(j)) + j, l }
    """
    x = as_vector(x)
    _check_ray(x, lam)
    chain = topk_norms_all(x)
    level = l0(x)
    top = chain[level]
    terms = [lam * top, float(level)]
    terms += [lam * (top - chain[j]) + j for j in range(1, level)]
    return min(terms)


@dataclass
class Conditioning:
    """How hard the ray limit of phi is to reach for a given x."""

    ill_conditioned: bool
    min_norm_gap: Optional[float]
    suggested_lambda_max: Optional[float]


def conditioning(x: npt.ArrayLike, tie_rel_gap: float = SOLVER_DEFAULTS['tie_rel_gap']) -> Conditioning:
    """
    Near-tie flag and the lambda from which phi(lambda) = l0(x)

    ill_conditioned is set when two nonzero magnitudes differ by less than
    tie_rel_gap relatively. min_norm_gap is the smallest increment of the
    chain ||x||_(0) < ... < ||x||_(l). suggested_lambda_max is
    max over j < l of (l - j) / (||x||_(l) - ||x||_(j)); phi reaches l0(x)
    for every lambda above it.
    """
    x = as_vector(x)
    magnitudes = np.sort(np.abs(x[x != 0.0]))[::-1]
    if magnitudes.size == 0:
        return Conditioning(False, None, None)

    relative = (magnitudes[:-1] - magnitudes[1:]) / magnitudes[:-1]
    ill = bool(relative.size and relative.min() < tie_rel_gap)

    chain = topk_norms_all(x)
    level = magnitudes.size
    increments = [chain[j + 1] - chain[j] for j in range(level)]
    min_gap = min(increments)
    if min_gap <= 0.0:
        return Conditioning(True, min_gap, math.inf)
    threshold = max((level - j) / (chain[level] - chain[j]) for j in range(level))
    return Conditioning(ill, min_gap, threshold)


@dataclass
class BiconjugateSearch:
    """
    Outcome of the sup over y of the biconjugate objective.

    ray_values holds (lambda, objective at lambda * ray_base(x)) for every
    ladder rung; best_restart is None when the ray family wins.
    """

    value: float
    ray_value: float
    best_lambda: float
    restart_value: float
    best_restart: Optional[int]
    evaluations: int
    ray_values: List[Tuple[float, float]] = field(default_factory=list)


def _ascend(
    objective: Callable[[np.ndarray], float],
    start: np.ndarray,
    step: float,
    max_sweeps: int = MAX_SWEEPS
) -> Tuple[float, int]:
    """Coordinate ascent with a halving step; returns (best value, evaluations)."""
    y = np.array(start, dtype=float)
    value = objective(y)
    evaluations = 1
    floor = 1e-12 * max(1.0, float(np.abs(y).max()))
    for _ in range(max_sweeps):
        improved = False
        moves = [y * 2.0]
        for i in range(y.shape[0]):
            for direction in (1.0, -1.0):
                candidate = np.array(y)
                candidate[i] += direction * step
                moves.append(candidate)
        for candidate in moves:
            candidate_value = objective(candidate)
            evaluations += 1
            noise = NOISE_FACTOR * (1.0 + float(np.abs(candidate).sum()))
            if candidate_value > value + noise:
                y, value, improved = candidate, candidate_value, True
        if not improved:
            step *= 0.5
            if step < floor:
                break
    return value, evaluations


def _search(
    x: Vector,
    pairing: Callable[[np.ndarray], float],
    ray_value: Callable[[float], float],
    lambda_max: float,
    restarts: int,
    seed: int,
    workers: int
) -> BiconjugateSearch:
    ladder = geometric_ladder(lambda_max)
    ray_values = [(float(lam), ray_value(float(lam))) for lam in ladder]
    best_lambda, best_ray = max(ray_values, key=lambda item: item[1])

    direction = np.array(normalization(x))

    def objective(y: np.ndarray) -> float:
        return pairing(y) - conj_l0(y)

    def restart(index: int) -> Tuple[float, int]:
        rng = np.random.default_rng([seed, index])
        lam = float(rng.choice(ladder))
        start = lam * (direction + 0.1 * rng.standard_normal(x.shape[0]))
        return _ascend(objective, start, step=0.25 * lam)

    if workers > 1 and restarts > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(restart, range(restarts)))
    else:
        outcomes = [restart(index) for index in range(restarts)]

    # deterministic reduction: highest value, lowest restart index
    restart_value, best_restart = -math.inf, None
    for index, (value, _) in enumerate(outcomes):
        if value > restart_value:
            restart_value, best_restart = value, index

    evaluations = len(ray_values) + sum(count for _, count in outcomes)
    if restart_value > best_ray:
        value = restart_value
    else:
        value, best_restart = best_ray, None
    return BiconjugateSearch(
        value=value,
        ray_value=best_ray,
        best_lambda=best_lambda,
        restart_value=restart_value,
        best_restart=best_restart,
        evaluations=evaluations,
        ray_values=ray_values,
    )


def ray_base(x: npt.ArrayLike) -> Vector:
    """x times the power of two that puts max |x_i| in [0.5, 1); 0 stays 0."""
    x = as_vector(x)
    peak = float(np.abs(x).max())
    if peak == 0.0 or math.isinf(peak):
        return x
    _, exponent = math.frexp(peak)
    return as_vector(np.ldexp(x, -exponent))


def biconj_l0_search(
    x: npt.ArrayLike,
    lambda_max: float = SOLVER_DEFAULTS['lambda_max'],
    restarts: int = SOLVER_DEFAULTS['restarts'],
    seed: int = 0,
    workers: int = 1
) -> BiconjugateSearch:
    """
    Search sup over y of Capra(x, y) - conj_l0(y)

    Args:
        x: Vector
        lambda_max: Top of the lambda ladder 1, 2, 4, ..., lambda_max
        restarts: Number of random restarts
        seed: Master seed; restart i uses default_rng([seed, i])
        workers: Threads used for the restarts

    Returns:
        BiconjugateSearch with the best value and where it came from
    """
    x = as_vector(x)
    if lambda_max <= 0:
        raise CapraError(f"lambda_max must be > 0, got {lambda_max}")
    if restarts < 0:
        raise CapraError(f"restarts must be >= 0, got {restarts}")
    if not x.any():
        # Capra(0, y) = 0 and min conj_l0 = conj_l0(0) = 0
        return BiconjugateSearch(0.0, 0.0, 0.0, -math.inf, None, 1)

    # the objective only sees x / ||x||; the rays run along a fixed rescaling
    base = ray_base(x)
    direction = np.array(normalization(x))
    return _search(
        base,
        pairing=lambda y: float(np.dot(direction, y)),
        ray_value=lambda lam: phi_ray(base, lam),
        lambda_max=lambda_max,
        restarts=restarts,
        seed=seed,
        workers=workers,
    )


def biconj_l0(
    x: npt.ArrayLike,
    lambda_max: float = SOLVER_DEFAULTS['lambda_max'],
    restarts: int = SOLVER_DEFAULTS['restarts'],
    seed: int = 0,
    workers: int = 1
) -> float:
    """Capra biconjugate of l0 at x, numerically (equal to l0(x) in exact arithmetic)."""
    return biconj_l0_search(x, lambda_max, restarts, seed, workers).value


def l0_on_sphere_via_fenchel(
    x: npt.ArrayLike,
    lambda_max: float = SOLVER_DEFAULTS['lambda_max'],
    restarts: int = SOLVER_DEFAULTS['restarts'],
    seed: int = 0,
    workers: int = 1
) -> float:
    """
    Fenchel conjugate of y -> max_l (||y||_(l) - l), evaluated at a unit x

    On the sphere this coincides with l0(x).

    Raises:
        NotOnSphereError: If | ||x|| - 1 | > 1e-9
    """
    x = as_vector(x)
    norm = euclidean_norm(x)
    if abs(norm - 1.0) > SPHERE_TOL:
        raise NotOnSphereError(f"||x|| = {norm!r} is not 1 within {SPHERE_TOL}")

    chain = topk_norms_all(x)
    squared = float(np.dot(x, x))
    search = _search(
        x,
        pairing=lambda y: float(np.dot(x, y)),
        ray_value=lambda lam: lam * squared - _conj_from_chain(chain, lam),
        lambda_max=lambda_max,
        restarts=restarts,
        seed=seed,
        workers=workers,
    )
    return search.value


@dataclass
class ConjugateReport:
    """
    Closed-form value next to an independent value for the same quantity.

    gap = |closed_form - oracle| whenever an oracle value is present.
    """

    point: List[float]
    function: str
    k: Optional[int]
    closed_form: float
    oracle: Optional[float]
    gap: Optional[float]
    samples: int
    ill_conditioned: bool = False
    min_norm_gap: Optional[float] = None
    suggested_lambda_max: Optional[float] = None

    def to_dict(self) -> dict:
        data = asdict(self)
        for key in ('closed_form', 'oracle', 'gap', 'min_norm_gap', 'suggested_lambda_max'):
            if data[key] is not None:
                data[key] = to_json(data[key])
        return data


def build_conjugate_report(
    point: npt.ArrayLike,
    function: str,
    closed_form: float,
    oracle: Optional[float] = None,
    k: Optional[int] = None,
    samples: int = 0,
    tie_rel_gap: float = SOLVER_DEFAULTS['tie_rel_gap'],
    lambda_max: float = SOLVER_DEFAULTS['lambda_max']
) -> ConjugateReport:
    """
    Assemble a ConjugateReport and attach the conditioning of the point

    Args:
        point: Point where both values were computed
        function: Tag of the computed quantity (e.g. 'conj_l0', 'biconj_l0')
        closed_form: Closed-form value
        oracle: Independent value (grid engine or search), if any
        k: Level for the level-set functions
        samples: Number of sample points behind the oracle value
        tie_rel_gap: Relative gap below which magnitudes count as tied
        lambda_max: Ladder top, compared with the suggested value

    Returns:
        ConjugateReport
    """
    x = as_vector(point)
    gap = None
    if oracle is not None:
        if math.isinf(closed_form) or math.isinf(oracle):
            gap = 0.0 if closed_form == oracle else math.inf
        else:
            gap = abs(closed_form - oracle)

    info = conditioning(x, tie_rel_gap)
    if info.suggested_lambda_max is not None and info.suggested_lambda_max > lambda_max:
        logger.warning(
            f"phi(lambda) limit needs lambda >= {info.suggested_lambda_max:.3g} "
            f"but lambda_max = {lambda_max:.3g}"
        )
    if info.ill_conditioned:
        logger.warning(f"Near-tied magnitudes in {x.tolist()}; phi-limit test is ill-conditioned")

    return ConjugateReport(
        point=x.tolist(),
        function=function,
        k=k,
        closed_form=float(closed_form),
        oracle=None if oracle is None else float(oracle),
        gap=gap,
        samples=int(samples),
        ill_conditioned=info.ill_conditioned,
        min_norm_gap=info.min_norm_gap,
        suggested_lambda_max=info.suggested_lambda_max,
    )
