"""
Verification Checks Module
Numerical checks of the closed forms against the oracles and the sampled
engine, grouped in suites (moreau, norms, engine, theorem)

Every check receives the resolved settings and its own seed and returns a
CheckOutcome; the runner turns that into a CheckResult with status and
timing.
"""

import hashlib
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Any, Callable, Dict, List, Tuple

import numpy as np

from src.closed_form.capra_l0 import (
    biconj_l0_search,
    biconj_levelset_indicator,
    build_conjugate_report,
    conj_l0,
    conj_levelset_indicator,
    l0_on_sphere_via_fenchel,
    phi_ray_rewritten,
    ray_base,
)
from src.core.extended_real import upp_add_array
from src.core.vectors_norms import (
    SupportSet,
    dot,
    euclidean_norm,
    in_sphere_K,
    ksupport_norm,
    l0,
    l0_via_norm_chain,
    level_curve_approximants,
    level_set_contains,
    project,
    topk_norm,
    topk_norms_all,
)
from src.exceptions import CapraError
from src.oracles.bruteforce import dual_norm_bruteforce, hull_membership_sampled, topk_norm_bruteforce
from src.oracles.moreau_table import moreau_law_table
from src.sampled.conjugacy_engine import (
    SampledFunction,
    biconjugate,
    capra_coupling,
    characteristic_function,
    conjugate_values,
    coordinate_zeroing,
    dual_bound,
    fenchel_coupling,
    identity_mapping,
    infimal_postcomposition,
    make_one_sided_linear,
    normalization_mapping,
    reverse_conjugate,
    support_function_sampled,
)
from src.sampled.sample_sets import (
    distinct_rows,
    geometric_ladder,
    l0_maximizer_samples,
    level_set_samples,
    support_vectors,
    uniform_ball,
    uniform_sphere,
)
from src.utils.logger import setup_logger

logger = setup_logger(__name__)

Settings = Dict[str, Any]

SUITES = ('moreau', 'norms', 'engine', 'theorem')
EPSILON_LADDER = [10.0 ** -p for p in range(1, 9)]


@dataclass
class CheckOutcome:
    passed: bool
    worst_gap: float
    cases: int
    details: Dict[str, Any] = field(default_factory=dict)


@dataclass
class CheckResult:
    """
    One row of a verification report.

    `statement` names the mathematical statement the check exercises, or
    'plumbing'; `reference` is the stable key of that statement.
    """

    check_id: str
    suite: str
    statement: str
    reference: str
    status: str
    worst_gap: float
    cases: int
    runtime_s: float
    details: Dict[str, Any] = field(default_factory=dict)
    message: str = ''


@dataclass(frozen=True)
class Check:
    check_id: str
    suite: str
    statement: str
    run: Callable[[Settings, int], CheckOutcome]
    reference: str = 'plumbing'


def check_seed(seed: int, check_id: str) -> int:
    """Per-check seed derived from the master seed and the check id."""
    digest = hashlib.sha256(f"{seed}:{check_id}".encode('utf-8')).digest()
    return int.from_bytes(digest[:8], 'big')


def _dims(settings: Settings, low: int = 1, high: int = 10) -> List[int]:
    return [d for d in settings['dims'] if low <= d <= high]


def _random_signs(rng: np.random.Generator, size: int) -> np.ndarray:
    return np.where(rng.random(size) < 0.5, -1.0, 1.0)


def _sparse_vector(
    rng: np.random.Generator,
    d: int,
    support_size: int,
    low: float = 0.1,
    high: float = 1.0
) -> np.ndarray:
    """Random vector with exactly support_size nonzeros, magnitudes in [low, high]."""
    x = np.zeros(d)
    if support_size:
        support = rng.choice(d, size=support_size, replace=False)
        x[support] = rng.uniform(low, high, support_size) * _random_signs(rng, support_size)
    return x


def _well_separated(x: np.ndarray, rel_gap: float) -> bool:
    magnitudes = np.sort(np.abs(x[x != 0.0]))[::-1]
    if magnitudes.size < 2:
        return True
    return bool(((magnitudes[:-1] - magnitudes[1:]) / magnitudes[:-1]).min() >= rel_gap)


def _relative_gap(a: float, b: float) -> float:
    return abs(a - b) / max(1.0, abs(a), abs(b))


# ---------------------------------------------------------------------------
# moreau

def check_moreau_laws(settings: Settings, seed: int) -> CheckOutcome:
    table = moreau_law_table()
    violated = table[table['violations'] > 0]
    return CheckOutcome(
        passed=violated.empty,
        worst_gap=float(table['violations'].max()),
        cases=int(table['cases'].sum()),
        details={
            'laws': int(len(table)),
            'violated_laws': violated['law'].tolist(),
        },
    )


# ---------------------------------------------------------------------------
# norms

def check_topk_bruteforce(settings: Settings, seed: int) -> CheckOutcome:
    rng = np.random.default_rng(seed)
    cases, mismatches = 0, 0
    worst = 0.0
    for d in _dims(settings, high=settings['enumeration_cap']):
        for _ in range(settings['norm_vectors']):
            x = rng.standard_normal(d)
            for k in range(d + 1):
                cases += 1
                closed = topk_norm(x, k)
                oracle = topk_norm_bruteforce(x, k)
                witness_value = euclidean_norm(project(x, oracle.witness))
                if closed != oracle.value or witness_value != oracle.value:
                    mismatches += 1
                    worst = max(worst, abs(closed - oracle.value))
    return CheckOutcome(mismatches == 0, worst, cases, {'mismatches': mismatches})


def check_ksupport_dual(settings: Settings, seed: int) -> CheckOutcome:
    rng = np.random.default_rng(seed)
    cases, failures = 0, 0
    worst = 0.0
    pairing_violations = 0
    for d in _dims(settings, high=6):
        for i in range(settings['dual_vectors']):
            x = rng.standard_normal(d)
            y = rng.standard_normal(d)
            for k in range(1, d + 1):
                cases += 1
                closed = ksupport_norm(x, k)
                oracle = dual_norm_bruteforce(x, k, budget=3, seed=int(rng.integers(2**32)))
                gap = _relative_gap(closed, oracle.value)
                worst = max(worst, gap)
                exact_ok = True
                if k == 1:
                    exact_ok = closed == math.fsum(abs(float(v)) for v in x)
                elif k == d:
                    exact_ok = closed == euclidean_norm(x)
                below_atoms = oracle.details['route_a'] > closed + 1e-12 * max(1.0, closed)
                if gap > 1e-6 or not exact_ok or below_atoms:
                    failures += 1
                if dot(x, y) > closed * topk_norm(y, k) * (1 + 1e-12) + 1e-12:
                    pairing_violations += 1
    passed = failures == 0 and pairing_violations == 0
    return CheckOutcome(passed, worst, cases, {
        'failures': failures,
        'pairing_violations': pairing_violations,
    })


def check_l0_chain(settings: Settings, seed: int) -> CheckOutcome:
    rng = np.random.default_rng(seed)
    cases, failures = 0, 0
    rel_tol = settings['rel_tol']
    for d in _dims(settings, high=settings['enumeration_cap']):
        for _ in range(settings['l0_vectors']):
            x = _sparse_vector(rng, d, int(rng.integers(0, d + 1)))
            cases += 1
            count = l0(x)
            ok = count == l0_via_norm_chain(x, rel_tol=rel_tol)
            ok = ok and all(level_set_contains(x, k, rel_tol) == (count <= k) for k in range(d + 1))
            ok = ok and l0(-3.5 * x) == count and l0(1e-3 * x) == count
            if not ok:
                failures += 1
    return CheckOutcome(failures == 0, float(failures), cases, {'failures': failures})


def check_chain_monotone(settings: Settings, seed: int) -> CheckOutcome:
    """||x||_(1) <= ... <= ||x||_(d) = ||x||, strict up to l0(x) and constant after."""
    rng = np.random.default_rng(seed)
    cases, failures = 0, 0
    for d in _dims(settings, high=settings['enumeration_cap']):
        for _ in range(settings['l0_vectors'] // 4 or 1):
            x = _sparse_vector(rng, d, int(rng.integers(0, d + 1)))
            chain = topk_norms_all(x)
            count = l0(x)
            cases += 1
            ok = chain[-1] == euclidean_norm(x)
            ok = ok and all(chain[j] < chain[j + 1] for j in range(count))
            ok = ok and all(chain[j] == chain[-1] for j in range(count, d + 1))
            if not ok:
                failures += 1
    return CheckOutcome(failures == 0, float(failures), cases, {'failures': failures})


def _log_uniform_vector(rng: np.random.Generator, d: int, low: float = 1e-150, high: float = 1e150) -> np.ndarray:
    """Signed entries with log-uniform magnitudes, about a third of them zero."""
    magnitudes = np.exp(rng.uniform(math.log(low), math.log(high), d))
    x = magnitudes * _random_signs(rng, d)
    x[rng.random(d) < 0.3] = 0.0
    return x


def check_norm_axioms(settings: Settings, seed: int) -> CheckOutcome:
    """Homogeneity, triangle inequality and definiteness of both norm families."""
    rng = np.random.default_rng(seed)
    cases, failures = 0, 0
    worst = 0.0
    for d in _dims(settings):
        for _ in range(settings['norm_vectors'] // 10 or 1):
            x = _log_uniform_vector(rng, d)
            y = _log_uniform_vector(rng, d)
            power = float(2.0 ** int(rng.integers(-60, 61)))
            lam = float(np.exp(rng.uniform(-20.0, 20.0)))
            for k in range(1, d + 1):
                for norm in (topk_norm, ksupport_norm):
                    cases += 1
                    value = norm(x, k)
                    exact = norm(power * x, k) == power * value
                    scaled = norm(lam * x, k)
                    homogeneous = abs(scaled - lam * value) <= 1e-12 * max(scaled, lam * value)
                    gap = (norm(x + y, k) - value - norm(y, k)) / max(value + norm(y, k), 1e-300)
                    worst = max(worst, gap)
                    definite = (value > 0.0) == bool(x.any()) and math.isfinite(value)
                    if not (exact and homogeneous and gap <= 1e-12 and definite):
                        failures += 1
    return CheckOutcome(failures == 0, worst, cases, {'failures': failures})


def check_orthogonal_decomposition(settings: Settings, seed: int) -> CheckOutcome:
    rng = np.random.default_rng(seed)
    cases, failures = 0, 0
    worst = 0.0
    for d in _dims(settings):
        for _ in range(settings['norm_vectors'] // 4 or 1):
            x = rng.standard_normal(d)
            K = SupportSet.from_mask(d, int(rng.integers(0, 2 ** d)))
            inside, outside = project(x, K), project(x, K.complement())
            cases += 1
            squared = euclidean_norm(x) ** 2
            gap = abs(squared - euclidean_norm(inside) ** 2 - euclidean_norm(outside) ** 2) / max(squared, 1e-300)
            worst = max(worst, gap)
            if gap > 1e-12 or dot(inside, outside) != 0.0 or not np.array_equal(inside + outside, x):
                failures += 1
    return CheckOutcome(failures == 0, worst, cases, {'failures': failures})


def check_sphere_intersection(settings: Settings, seed: int) -> CheckOutcome:
    rng = np.random.default_rng(seed)
    cases, failures = 0, 0
    for d in _dims(settings, high=6):
        for _ in range(settings['sphere_vectors']):
            x = _sparse_vector(rng, d, int(rng.integers(1, d + 1)))
            x = x / euclidean_norm(x)
            for k in range(d + 1):
                cases += 1
                in_some_sphere = any(
                    in_sphere_K(x, SupportSet.of(d, subset)) for subset in combinations(range(d), k)
                )
                if level_set_contains(x, k) != in_some_sphere:
                    failures += 1
    return CheckOutcome(failures == 0, float(failures), cases, {'failures': failures})


def check_hull_membership(settings: Settings, seed: int) -> CheckOutcome:
    rng = np.random.default_rng(seed)
    cases, failures = 0, 0
    for d in _dims(settings, high=6):
        for _ in range(settings['sphere_vectors'] // 4 or 1):
            x = _sparse_vector(rng, d, int(rng.integers(1, d + 1)))
            x = x / euclidean_norm(x)
            for k in range(1, d + 1):
                cases += 1
                result = hull_membership_sampled(x, k, n_samples=128, seed=int(rng.integers(2**32)))
                if not result.details['consistent'] or result.value != (l0(x) <= k):
                    failures += 1
    return CheckOutcome(failures == 0, float(failures), cases, {'failures': failures})


# ---------------------------------------------------------------------------
# engine

def _random_function(rng: np.random.Generator, d: int, max_points: int = 64) -> SampledFunction:
    n = int(rng.integers(1, max_points + 1))
    points = uniform_ball(n, d, seed=int(rng.integers(2**32)), radius=2.0)
    values = rng.normal(0.0, 1.0, n)
    draw = rng.random(n)
    values[draw < 0.15] = np.inf
    values[draw > 0.97] = -np.inf
    return SampledFunction(points, values)


def _thetas(rng: np.random.Generator, d: int):
    K = SupportSet.from_mask(d, int(rng.integers(0, 2 ** d)))
    return [identity_mapping(), normalization_mapping(), coordinate_zeroing(K)]


def check_one_sided_identity(settings: Settings, seed: int) -> CheckOutcome:
    """Conjugate under <theta(.), .> equals the Fenchel conjugate of theta |> f, exactly."""
    rng = np.random.default_rng(seed)
    cases, failures = 0, 0
    fenchel = fenchel_coupling()
    for i in range(settings['engine_functions']):
        d = int(rng.choice(_dims(settings, high=4) or [2]))
        f = _random_function(rng, d)
        dual = uniform_ball(16, d, seed=int(rng.integers(2**32)), radius=3.0)
        for theta in _thetas(rng, d):
            cases += 1
            direct = conjugate_values(f, make_one_sided_linear(theta), dual)
            via_postcomposition = conjugate_values(infimal_postcomposition(f, theta), fenchel, dual)
            if not np.array_equal(direct, via_postcomposition):
                failures += 1
                logger.debug(f"one-sided identity mismatch for theta={theta.name}, d={d}")
    return CheckOutcome(failures == 0, float(failures), cases, {'failures': failures})


def check_reverse_identity(settings: Settings, seed: int) -> CheckOutcome:
    rng = np.random.default_rng(seed)
    cases, failures = 0, 0
    fenchel = fenchel_coupling()
    for _ in range(settings['engine_functions']):
        d = int(rng.choice(_dims(settings, high=4) or [2]))
        g = _random_function(rng, d)
        primal = uniform_ball(16, d, seed=int(rng.integers(2**32)), radius=3.0)
        for theta in _thetas(rng, d):
            cases += 1
            direct = reverse_conjugate(g, make_one_sided_linear(theta), primal).values
            composed = conjugate_values(g, fenchel.reverse(), theta.apply_rows(primal))
            if not np.array_equal(direct, composed):
                failures += 1
    return CheckOutcome(failures == 0, float(failures), cases, {'failures': failures})


def check_characteristic_identity(settings: Settings, seed: int) -> CheckOutcome:
    """Conjugate of delta_W under -c_theta is the support function of -theta(W)."""
    rng = np.random.default_rng(seed)
    cases, failures = 0, 0
    for _ in range(settings['engine_functions']):
        d = int(rng.choice(_dims(settings, high=4) or [2]))
        n = int(rng.integers(1, 65))
        W = uniform_ball(n, d, seed=int(rng.integers(2**32)), radius=2.0)
        delta = characteristic_function(W, np.ones(n, dtype=bool))
        dual = uniform_ball(16, d, seed=int(rng.integers(2**32)), radius=3.0)
        for theta in _thetas(rng, d):
            cases += 1
            grid = conjugate_values(delta, make_one_sided_linear(theta).negate(), dual)
            image = -theta.apply_rows(W)
            sigma = np.array([support_function_sampled(image, y) for y in dual])
            if not np.array_equal(grid, sigma):
                failures += 1
    return CheckOutcome(failures == 0, float(failures), cases, {'failures': failures})


def check_biconjugate_ceiling(settings: Settings, seed: int) -> CheckOutcome:
    rng = np.random.default_rng(seed)
    cases, failures = 0, 0
    couplings = [capra_coupling(), fenchel_coupling()]
    for _ in range(settings['engine_functions']):
        d = int(rng.choice(_dims(settings, high=4) or [2]))
        f = _random_function(rng, d)
        dual = uniform_ball(32, d, seed=int(rng.integers(2**32)), radius=4.0)
        for c in couplings + [make_one_sided_linear(_thetas(rng, d)[2])]:
            cases += 1
            try:
                biconjugate(f, c, dual, slack=settings['ceiling_slack'])
            except CapraError as e:
                failures += 1
                logger.error(f"Ceiling check failed for coupling {c.name}: {e}")
    return CheckOutcome(failures == 0, float(failures), cases, {'failures': failures})


def check_dual_bound(settings: Settings, seed: int) -> CheckOutcome:
    rng = np.random.default_rng(seed)
    cases, failures = 0, 0
    capra = capra_coupling()
    for _ in range(settings['engine_functions']):
        d = int(rng.choice(_dims(settings, high=4) or [2]))
        f = _random_function(rng, d)
        dual = uniform_ball(16, d, seed=int(rng.integers(2**32)), radius=3.0)
        mask = rng.random(len(f)) < 0.5
        mask[0] = True
        g = characteristic_function(f.points, mask)
        cases += 1
        try:
            bound = dual_bound(f, g, capra, dual, slack=settings['ceiling_slack'])
        except CapraError as e:
            failures += 1
            logger.error(f"Dual bound violated: {e}")
            continue
        # characteristic collapse: upper = inf of f over the constraint set
        if bound.upper.value != float(f.values[mask].min()):
            failures += 1
    return CheckOutcome(failures == 0, float(failures), cases, {'failures': failures})


def check_order_reversal(settings: Settings, seed: int) -> CheckOutcome:
    rng = np.random.default_rng(seed)
    cases, failures = 0, 0
    capra = capra_coupling()
    for _ in range(settings['engine_functions']):
        d = int(rng.choice(_dims(settings, high=4) or [2]))
        f = _random_function(rng, d)
        bump = rng.exponential(1.0, len(f))
        bump[rng.random(len(f)) < 0.1] = np.inf
        g = SampledFunction(f.points, upp_add_array(f.values, bump))
        dual = uniform_ball(16, d, seed=int(rng.integers(2**32)), radius=3.0)
        cases += 1
        if (conjugate_values(f, capra, dual) < conjugate_values(g, capra, dual)).any():
            failures += 1
    return CheckOutcome(failures == 0, float(failures), cases, {'failures': failures})


def check_capra_ray_constancy(settings: Settings, seed: int) -> CheckOutcome:
    rng = np.random.default_rng(seed)
    cases, failures = 0, 0
    worst = 0.0
    capra = capra_coupling()
    for _ in range(settings['engine_functions'] // 4 or 1):
        d = int(rng.choice(_dims(settings, high=4) or [2]))
        # d = 1 draws only +1 and -1
        base = distinct_rows(uniform_sphere(8, d, seed=int(rng.integers(2**32))))
        scales = np.array([1.0, 0.5, 2.0, 7.3])
        points = np.vstack([s * base for s in scales])
        f = SampledFunction(points, rng.normal(0.0, 1.0, points.shape[0]))
        dual = uniform_ball(32, d, seed=int(rng.integers(2**32)), radius=3.0)
        bi = biconjugate(f, capra, dual, slack=settings['ceiling_slack']).values.reshape(len(scales), -1)
        coupling_values = capra.matrix(points, dual).reshape(len(scales), base.shape[0], -1)
        cases += 1
        scale = max(1.0, float(np.abs(coupling_values).max()))
        gap = max(float(np.abs(bi - bi[0]).max()), float(np.abs(coupling_values - coupling_values[0]).max()))
        worst = max(worst, gap / scale)
        if gap > 1e-12 * scale:
            failures += 1
    return CheckOutcome(failures == 0, worst, cases, {'failures': failures})


# ---------------------------------------------------------------------------
# theorem

def _equal_magnitude_probes(d: int, scale: float = 1.5) -> np.ndarray:
    return scale * np.array(list(product((1.0, -1.0), repeat=d)))


def check_conj_levelset(settings: Settings, seed: int) -> CheckOutcome:
    rng = np.random.default_rng(seed)
    cases, failures = 0, 0
    worst = 0.0
    capra = capra_coupling()
    for d in _dims(settings, high=3):
        axis = np.vstack([np.eye(d), -np.eye(d)])
        probes = np.vstack([axis, _equal_magnitude_probes(d)])
        random_y = 2.0 * rng.standard_normal((8, d))
        for k in range(d + 1):
            W = level_set_samples(d, k, n=64, seed=int(rng.integers(2**32)))
            delta = SampledFunction.constant(W, 0.0)
            for c in (capra, capra.negate()):
                grid_probes = conjugate_values(delta, c, probes)
                grid_random = conjugate_values(delta, c, random_y)
                for y, value in zip(probes, grid_probes):
                    cases += 1
                    closed = conj_levelset_indicator(y, k)
                    gap = abs(value - closed)
                    worst = max(worst, gap)
                    if gap > 1e-12 * max(1.0, closed):
                        failures += 1
                for y, value in zip(random_y, grid_random):
                    cases += 1
                    closed = conj_levelset_indicator(y, k)
                    if value > closed + 1e-12 * max(1.0, closed):
                        failures += 1
    return CheckOutcome(failures == 0, worst, cases, {'failures': failures})


def check_biconj_levelset(settings: Settings, seed: int) -> CheckOutcome:
    """Zero on sampled level-set points, unbounded growth along rays outside."""
    rng = np.random.default_rng(seed)
    cases, failures = 0, 0
    capra = capra_coupling()
    ladder_top = 1e3
    for d in _dims(settings, low=2, high=3):
        for k in range(d):
            inside = level_set_samples(d, k, n=16, seed=int(rng.integers(2**32)))
            outside = uniform_sphere(8, d, seed=int(rng.integers(2**32)))
            points = np.vstack([inside, outside])
            mask = np.arange(points.shape[0]) < inside.shape[0]
            delta = characteristic_function(points, mask)
            rays = np.vstack([lam * outside for lam in geometric_ladder(ladder_top)])
            dual = np.vstack([np.zeros((1, d)), support_vectors(d), rays])
            bi = biconjugate(delta, capra, dual, slack=settings['ceiling_slack']).values
            for x, value, member in zip(points, bi, mask):
                cases += 1
                closed = biconj_levelset_indicator(x, k)
                if member:
                    ok = closed.value == 0.0 and abs(value) <= 1e-12 * ladder_top
                else:
                    floor = ladder_top * (1.0 - topk_norm(x, k)) - 1e-9 * ladder_top
                    ok = closed.is_pos_inf and value >= floor and value > 0.0
                if not ok:
                    failures += 1
    return CheckOutcome(failures == 0, float(failures), cases, {'failures': failures})


def check_conj_l0_grid(settings: Settings, seed: int) -> CheckOutcome:
    rng = np.random.default_rng(seed)
    cases, failures = 0, 0
    worst = 0.0
    capra = capra_coupling()
    for d in _dims(settings, low=2, high=4):
        for _ in range(settings['conj_vectors']):
            y = 3.0 * rng.standard_normal(d)
            points = np.vstack([
                l0_maximizer_samples(y),
                uniform_sphere(8, d, seed=int(rng.integers(2**32))),
            ])
            f = SampledFunction.from_callable(points, l0)
            grid = float(conjugate_values(f, capra, y)[0])
            closed = conj_l0(y)
            cases += 1
            gap = abs(grid - closed)
            worst = max(worst, gap)
            if gap > 1e-10:
                failures += 1
    return CheckOutcome(failures == 0, worst, cases, {'failures': failures})


def check_biconj_l0(settings: Settings, seed: int) -> CheckOutcome:
    rng = np.random.default_rng(seed)
    cases, failures = 0, 0
    worst = 0.0
    flagged = 0
    tol = settings['biconj_tol']
    for d in _dims(settings, low=2, high=4):
        for i in range(settings['biconj_vectors']):
            x = _sparse_vector(rng, d, int(rng.integers(1, d + 1)))
            while not _well_separated(x, 1e-6):
                x = _sparse_vector(rng, d, l0(x))
            target = float(l0(x))
            search = biconj_l0_search(
                x,
                lambda_max=settings['lambda_max'],
                restarts=settings['theorem_restarts'],
                seed=int(rng.integers(2**32)),
                workers=1,
            )
            report = build_conjugate_report(
                x, 'biconj_l0', closed_form=target, oracle=search.value,
                tie_rel_gap=settings['tie_rel_gap'], lambda_max=settings['lambda_max'],
            )
            cases += 1
            worst = max(worst, report.gap)
            sandwich = all(phi <= search.value and phi <= target + tol for _, phi in search.ray_values)
            base = ray_base(x)
            rewritten = all(
                abs(phi - phi_ray_rewritten(base, lam)) <= 1e-9 * max(1.0, lam * euclidean_norm(base))
                for lam, phi in search.ray_values
            )
            ok = report.gap <= tol and search.value <= target + tol and sandwich and rewritten
            if report.ill_conditioned:
                flagged += 1
            elif not ok:
                failures += 1
    return CheckOutcome(failures == 0, worst, cases, {'failures': failures, 'ill_conditioned': flagged})


def check_sphere_corollary(settings: Settings, seed: int) -> CheckOutcome:
    rng = np.random.default_rng(seed)
    cases, failures = 0, 0
    worst = 0.0
    for d in _dims(settings, low=2, high=4):
        for i in range(settings['sphere_vectors']):
            x = _sparse_vector(rng, d, 1 + i % d)
            while not _well_separated(x, 1e-6):
                x = _sparse_vector(rng, d, 1 + i % d)
            x = x / euclidean_norm(x)
            value = l0_on_sphere_via_fenchel(
                x,
                lambda_max=settings['lambda_max'],
                restarts=settings['theorem_restarts'],
                seed=int(rng.integers(2**32)),
            )
            cases += 1
            gap = abs(value - l0(x))
            worst = max(worst, gap)
            if gap > settings['biconj_tol']:
                failures += 1
    return CheckOutcome(failures == 0, worst, cases, {'failures': failures})


def check_closure_ladder(settings: Settings, seed: int) -> CheckOutcome:
    """Unit vectors with l0 <= k are limits of unit vectors with l0 = k."""
    rng = np.random.default_rng(seed)
    cases, failures = 0, 0
    for d in _dims(settings, high=4):
        for k in range(1, d + 1):
            for _ in range(8):
                x = _sparse_vector(rng, d, int(rng.integers(1, k + 1)))
                x = x / euclidean_norm(x)
                missing = k - l0(x)
                ladder = level_curve_approximants(x, k, EPSILON_LADDER)
                distances = [distance for _, _, distance in ladder]
                cases += 1
                ok = all(l0(approximant) == k for _, approximant, _ in ladder)
                ok = ok and all(abs(euclidean_norm(a) - 1.0) <= 1e-12 for _, a, _ in ladder)
                ok = ok and all(
                    distance <= 2.0 * eps * math.sqrt(missing) + 1e-12 for eps, _, distance in ladder
                )
                ok = ok and all(a >= b for a, b in zip(distances, distances[1:]))
                if not ok:
                    failures += 1
    return CheckOutcome(failures == 0, float(failures), cases, {'failures': failures})


REGISTRY: Tuple[Check, ...] = (
    Check('moreau.laws', 'moreau', 'Moreau lower/upper addition laws', check_moreau_laws,
          reference='moreau-addition-laws'),
    Check('norms.topk_bruteforce', 'norms', 'top-k norm as max of ||x_K|| over |K| = k', check_topk_bruteforce,
          reference='topk-norm-max-over-supports'),
    Check('norms.ksupport_dual', 'norms', 'k-support norm as dual of the top-k norm', check_ksupport_dual,
          reference='ksupport-norm-dual-of-topk'),
    Check('norms.l0_chain', 'norms', 'l0(x) <= k iff ||x||_(k) = ||x||', check_l0_chain,
          reference='l0-level-set-via-topk'),
    Check('norms.chain_monotone', 'norms', 'top-k norm chain, strict up to l0', check_chain_monotone,
          reference='topk-chain-strict-up-to-l0'),
    Check('norms.axioms', 'norms', 'top-k and k-support norms satisfy the norm axioms', check_norm_axioms,
          reference='norm-axioms'),
    Check('norms.orthogonal_decomposition', 'norms', '||x||^2 = ||x_K||^2 + ||x_-K||^2',
          check_orthogonal_decomposition, reference='orthogonal-decomposition'),
    Check('norms.sphere_intersection', 'norms', 'sphere and l0 level set as union of S_K',
          check_sphere_intersection, reference='level-set-sphere-union'),
    Check('norms.hull_membership', 'norms', 'sphere and k-support ball equals sphere and level set',
          check_hull_membership, reference='ksupport-ball-sphere-intersection'),
    Check('engine.one_sided_identity', 'engine', 'one-sided linear conjugate via infimal postcomposition',
          check_one_sided_identity, reference='one-sided-conjugate-postcomposition'),
    Check('engine.reverse_identity', 'engine', 'one-sided linear reverse conjugate', check_reverse_identity,
          reference='one-sided-reverse-conjugate'),
    Check('engine.characteristic_identity', 'engine', 'conjugate of a characteristic function',
          check_characteristic_identity, reference='characteristic-conjugate-support-function'),
    Check('engine.biconjugate_ceiling', 'engine', 'biconjugate <= function', check_biconjugate_ceiling,
          reference='biconjugate-below-function'),
    Check('engine.dual_bound', 'engine', 'weak duality inequality', check_dual_bound,
          reference='weak-duality'),
    Check('engine.order_reversal', 'engine', 'f <= g implies conjugates reversed', check_order_reversal,
          reference='conjugate-order-reversal'),
    Check('engine.capra_ray_constancy', 'engine', 'Capra coupling and biconjugates constant on rays',
          check_capra_ray_constancy, reference='capra-constant-on-rays'),
    Check('theorem.conj_levelset', 'theorem', 'Capra conjugate of the level-set indicator',
          check_conj_levelset, reference='capra-conjugate-level-set'),
    Check('theorem.biconj_levelset', 'theorem', 'Capra biconjugate of the level-set indicator',
          check_biconj_levelset, reference='capra-biconjugate-level-set'),
    Check('theorem.conj_l0_grid', 'theorem', 'Capra conjugate of l0', check_conj_l0_grid,
          reference='capra-conjugate-l0'),
    Check('theorem.biconj_l0', 'theorem', 'Capra biconjugate of l0 equals l0', check_biconj_l0,
          reference='capra-biconjugate-l0'),
    Check('theorem.sphere_corollary', 'theorem', 'l0 on the sphere as a convex lsc function',
          check_sphere_corollary, reference='l0-convex-on-sphere'),
    Check('theorem.closure_ladder', 'theorem', 'closure of the l0 level curve on the sphere',
          check_closure_ladder, reference='level-curve-closure'),
)



def checks_for_suite(suite: str) -> List[Check]:
    """Checks of one suite in registry order; 'all' selects every check."""
    if suite == 'all':
        return list(REGISTRY)
    if suite not in SUITES:
        raise CapraError(f"Unknown suite '{suite}' (choose from {', '.join(SUITES)} or all)")
    return [check for check in REGISTRY if check.suite == suite]


def run_check(check: Check, settings: Settings) -> CheckResult:
    """Run one check with its derived seed; exceptions become status 'error'."""
    seed = check_seed(settings['seed'], check.check_id)
    logger.info(f"Running check {check.check_id}...")
    start = time.perf_counter()
    try:
        outcome = check.run(settings, seed)
        status = 'pass' if outcome.passed else 'fail'
        message = ''
    except Exception as e:
        logger.error(f"Check {check.check_id} raised: {str(e)}", exc_info=True)
        outcome = CheckOutcome(False, math.inf, 0)
        status = 'error'
        message = f"{type(e).__name__}: {e}"
    runtime = time.perf_counter() - start
    logger.info(f"Check {check.check_id}: {status} ({outcome.cases} cases, {runtime:.2f}s)")
    return CheckResult(
        check_id=check.check_id,
        suite=check.suite,
        statement=check.statement,
        reference=check.reference,
        status=status,
        worst_gap=float(outcome.worst_gap),
        cases=int(outcome.cases),
        runtime_s=runtime,
        details=outcome.details,
        message=message,
    )


def run_checks(checks: List[Check], settings: Settings) -> List[CheckResult]:
    """Run checks concurrently; results come back in the order given."""
    workers = max(1, int(settings['workers']))
    if workers == 1 or len(checks) <= 1:
        return [run_check(check, settings) for check in checks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda check: run_check(check, settings), checks))
