"""
Vectors and Norms Module
Support sets, the l0 pseudonorm, top-k (2-k-symmetric gauge) norms,
k-support norms, degenerate spheres/balls and l0 level-set predicates

Every sum of squares goes through math.fsum over entries divided by the
largest magnitude, so a norm value depends only on the multiset of
magnitudes and neither underflows nor overflows before the final product.
"""

import math
from dataclasses import dataclass
from typing import FrozenSet, Iterable, List, Sequence, Tuple

import numpy as np
import numpy.typing as npt
from scipy.optimize import minimize

from src.core.extended_real import check_no_nan
from src.exceptions import DimensionMismatchError, OrderOutOfRangeError, CapraError
from src.utils.logger import setup_logger

logger = setup_logger(__name__)

Vector = npt.NDArray[np.float64]

DEFAULT_REL_TOL = 1e-9


def as_vector(values: npt.ArrayLike) -> Vector:
    """
    Build an immutable float64 vector

    Args:
        values: Sequence of d >= 1 reals

    Returns:
        Read-only 1-D numpy array

    Raises:
        CapraError: If the input is not 1-D or empty
        NaNValueError: If an entry is NaN
    """
    array = np.array(values, dtype=np.float64)
    if array.ndim != 1 or array.size < 1:
        raise CapraError(f"A vector must be 1-D with d >= 1, got shape {array.shape}")
    check_no_nan(array, 'vector entries')
    array.flags.writeable = False
    return array


@dataclass(frozen=True)
class SupportSet:
    """
    Subset K of {0, ..., dim-1}.

    Members are 0-based indices; `mask` gives the equivalent bitmask.
    """

    dim: int
    members: FrozenSet[int]

    def __post_init__(self):
        members = frozenset(int(i) for i in self.members)
        if self.dim < 1:
            raise CapraError(f"Support set dimension must be >= 1, got {self.dim}")
        bad = [i for i in members if not 0 <= i < self.dim]
        if bad:
            raise DimensionMismatchError(f"Indices {sorted(bad)} outside 0..{self.dim - 1}")
        object.__setattr__(self, 'members', members)

    @classmethod
    def of(cls, dim: int, members: Iterable[int]) -> 'SupportSet':
        return cls(dim, frozenset(members))

    @classmethod
    def full(cls, dim: int) -> 'SupportSet':
        return cls(dim, frozenset(range(dim)))

    @classmethod
    def from_mask(cls, dim: int, mask: int) -> 'SupportSet':
        return cls(dim, frozenset(i for i in range(dim) if mask >> i & 1))

    @property
    def mask(self) -> int:
        return sum(1 << i for i in self.members)

    @property
    def indices(self) -> Tuple[int, ...]:
        return tuple(sorted(self.members))

    def complement(self) -> 'SupportSet':
        """The set -K with K u (-K) = {0..dim-1} and K n (-K) empty."""
        return SupportSet(self.dim, frozenset(range(self.dim)) - self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, index: int) -> bool:
        return index in self.members


def _check_support(x: Vector, K: SupportSet) -> None:
    if K.dim != x.shape[0]:
        raise DimensionMismatchError(f"Support set lives in R^{K.dim}, vector in R^{x.shape[0]}")


def _check_order(k: int, d: int, lowest: int = 0) -> None:
    if not lowest <= k <= d:
        raise OrderOutOfRangeError(f"k={k} outside {lowest}..{d}")


def project(x: npt.ArrayLike, K: SupportSet) -> Vector:
    """x_K: coincides with x on K, zero elsewhere."""
    x = as_vector(x)
    _check_support(x, K)
    out = np.zeros_like(x)
    idx = list(K.indices)
    out[idx] = x[idx]
    out.flags.writeable = False
    return out


def dot(x: npt.ArrayLike, y: npt.ArrayLike) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise DimensionMismatchError(f"Cannot pair vectors of shapes {x.shape} and {y.shape}")
    return float(np.dot(x, y))


def _root_sum_squares(magnitudes: Sequence[float]) -> float:
    """sqrt(sum v^2) for nonnegative v, scaled by the largest entry."""
    peak = max(magnitudes, default=0.0)
    if peak == 0.0 or math.isinf(peak):
        return peak
    return peak * math.sqrt(math.fsum((v / peak) * (v / peak) for v in magnitudes))


def euclidean_norm(x: npt.ArrayLike) -> float:
    x = np.asarray(x, dtype=float)
    return _root_sum_squares([abs(float(v)) for v in x])


def l0(x: npt.ArrayLike, zero_tol: float = 0.0) -> int:
    """Number of entries with |x_i| > zero_tol."""
    if zero_tol < 0:
        raise CapraError("zero_tol must be >= 0")
    x = as_vector(x)
    return int(np.count_nonzero(np.abs(x) > zero_tol))


def _sorted_magnitudes(x: Vector) -> List[float]:
    return sorted((abs(float(v)) for v in x), reverse=True)


def topk_norm(x: npt.ArrayLike, k: int) -> float:
    """
    2-k-symmetric gauge norm (Ky Fan vector norm)

    Euclidean norm of the k largest-magnitude coordinates; 0 for k = 0,
    the sup norm for k = 1 and the Euclidean norm for k = d.

    Args:
        x: Vector of R^d
        k: Order, 0 <= k <= d

    Returns:
        ||x||_(k)
    """
    x = as_vector(x)
    _check_order(k, x.shape[0])
    if k == 0:
        return 0.0
    return _root_sum_squares(_sorted_magnitudes(x)[:k])


def topk_norms_all(x: npt.ArrayLike) -> List[float]:
    """[||x||_(0), ||x||_(1), ..., ||x||_(d)] from a single sort."""
    x = as_vector(x)
    magnitudes = _sorted_magnitudes(x)
    return [0.0] + [_root_sum_squares(magnitudes[:j]) for j in range(1, len(magnitudes) + 1)]


def _ksupport_split(z: Sequence[float], k: int) -> Tuple[int, float]:
    """
    Threshold index r for the sorted magnitudes z (descending).

    Returns (r, tail_sum) with z[k-r-2] > tail_sum/(r+1) >= z[k-r-1]
    (0-based, z[-1] read as +inf), tail_sum = sum of z[k-r-1:].
    """
    d = len(z)
    for r in range(k):
        tail = math.fsum(z[k - r - 1:d])
        average = tail / (r + 1)
        upper = math.inf if k - r - 2 < 0 else z[k - r - 2]
        if upper > average >= z[k - r - 1]:
            return r, tail
    return k - 1, math.fsum(z)


def _ksupport_closed_form(x: Vector, k: int) -> Tuple[float, Vector]:
    d = x.shape[0]
    magnitudes = np.abs(x)
    if not magnitudes.any():
        return 0.0, np.zeros(d)
    if np.isinf(magnitudes).any():
        return math.inf, np.sign(x)
    if k == d:
        return euclidean_norm(x), np.array(normalization(x))
    if k == 1:
        try:
            value = math.fsum(float(v) for v in magnitudes)
        except OverflowError:
            value = math.inf
        return value, np.sign(x)

    peak = float(magnitudes.max())
    order = np.argsort(-magnitudes, kind='stable')
    # work on z / max|x| so the squares stay representable
    z = [float(v) / peak for v in magnitudes[order]]
    r, tail = _ksupport_split(z, k)
    head = z[:k - r - 1]
    scaled = math.sqrt(math.fsum(v * v for v in head) + tail * tail / (r + 1))
    value = peak * scaled

    # Dual maximizer: head entries proportional to z, tail flattened to the average
    sorted_certificate = np.array(head + [tail / (r + 1)] * (d - len(head))) / scaled
    certificate = np.zeros(d)
    certificate[order] = sorted_certificate
    return value, certificate * np.sign(x)


def ksupport_certificate(x: npt.ArrayLike, k: int) -> Vector:
    """
    Dual maximizer y* for the k-support norm of x

    ||y*||_(k) <= 1 and <x, y*> = ||x||^sp_k (up to rounding).
    """
    x = as_vector(x)
    _check_order(k, x.shape[0], lowest=1)
    return _ksupport_closed_form(x, k)[1]


def _ksupport_direct(x: Vector, k: int, start: Vector) -> float:
    """Maximize <x, y> over ||y||_(k) <= 1 with SLSQP, started at `start`."""
    result = minimize(
        lambda y: -float(np.dot(x, y)),
        start,
        jac=lambda y: -x,
        constraints=[{'type': 'ineq', 'fun': lambda y: 1.0 - topk_norm(y, k) ** 2}],
        method='SLSQP',
        options={'maxiter': 500, 'ftol': 1e-14},
    )
    y = np.asarray(result.x, dtype=float)
    y = y / max(1.0, topk_norm(y, k))
    return float(np.dot(x, y))


def ksupport_norm(x: npt.ArrayLike, k: int, check_certificate: bool = True) -> float:
    """
    k-support norm: the dual norm of topk_norm(., k)

    Computed with the sorted-magnitude closed form. When check_certificate is
    set the closed form is gated by its dual certificate; if the certificate
    fails the value falls back to direct maximization of <x, y> over the
    top-k unit ball.

    Args:
        x: Vector of R^d
        k: Order, 1 <= k <= d
        check_certificate: Verify the closed form before returning it

    Returns:
        ||x||^sp_k
    """
    x = as_vector(x)
    _check_order(k, x.shape[0], lowest=1)
    value, certificate = _ksupport_closed_form(x, k)
    if not check_certificate or value == 0.0 or math.isinf(value):
        return value

    scale = max(1.0, value)
    feasible = topk_norm(certificate, k) <= 1.0 + 1e-9
    attained = abs(float(np.dot(x, certificate)) - value) <= 1e-9 * scale
    if feasible and attained:
        return value

    logger.warning(
        f"k-support closed form failed its certificate (k={k}, d={x.shape[0]}); "
        f"falling back to direct maximization"
    )
    return max(_ksupport_direct(x, k, certificate), 0.0)


def l0_via_norm_chain(
    x: npt.ArrayLike,
    zero_tol: float = 0.0,
    rel_tol: float = 0.0
) -> int:
    """
    min{ j : ||x||_(j) = ||x|| }

    The equality is read on what the top-j coordinates leave out: j is
    accepted once the Euclidean norm of the remaining d - j magnitudes is
    at most rel_tol * ||x||. With rel_tol = 0 this is exact, so a tail far
    below the rounding unit of ||x|| still counts.

    Args:
        x: Vector of R^d
        zero_tol: Entries with |x_i| <= zero_tol are zeroed first
        rel_tol: Relative size of the tail that is treated as zero

    Returns:
        Index in 0..d
    """
    if zero_tol < 0:
        raise CapraError("zero_tol must be >= 0")
    if rel_tol < 0:
        raise CapraError("rel_tol must be >= 0")
    x = np.array(as_vector(x))
    x[np.abs(x) <= zero_tol] = 0.0
    magnitudes = _sorted_magnitudes(x)
    full = _root_sum_squares(magnitudes)
    for j in range(len(magnitudes)):
        tail = _root_sum_squares(magnitudes[j:])
        if tail == 0.0 or (math.isfinite(full) and tail <= rel_tol * full):
            return j
    return len(magnitudes)


def level_set_contains(x: npt.ArrayLike, k: int, rel_tol: float = DEFAULT_REL_TOL) -> bool:
    """l0(x) <= k, tested as ||x||_(k) >= (1 - rel_tol) ||x||."""
    x = as_vector(x)
    _check_order(k, x.shape[0])
    return topk_norm(x, k) >= (1.0 - rel_tol) * euclidean_norm(x)


def level_curve_contains(x: npt.ArrayLike, k: int, rel_tol: float = 0.0) -> bool:
    """l0(x) = k, via the norm chain."""
    x = as_vector(x)
    _check_order(k, x.shape[0])
    return l0_via_norm_chain(x, rel_tol=rel_tol) == k


def support_fn_ball_K(y: npt.ArrayLike, K: SupportSet) -> float:
    """Support function of B_K = {x : x_{-K} = 0, ||x_K|| <= 1}, i.e. ||y_K||."""
    y = as_vector(y)
    _check_support(y, K)
    return euclidean_norm(project(y, K))


def normalization(x: npt.ArrayLike) -> Vector:
    """x / ||x|| for x != 0, and 0 at 0."""
    x = as_vector(x)
    peak = float(np.abs(x).max())
    if peak == 0.0:
        return as_vector(np.zeros_like(x))
    if math.isinf(peak):
        raise CapraError("Cannot normalize a vector with infinite entries")
    scaled = x / peak
    return as_vector(scaled / euclidean_norm(scaled))


# Degenerate unit spheres and balls attached to a support set K

def in_esphere_K(x: npt.ArrayLike, K: SupportSet, tol: float = DEFAULT_REL_TOL) -> bool:
    return abs(support_fn_ball_K(x, K) - 1.0) <= tol


def in_eball_K(x: npt.ArrayLike, K: SupportSet, tol: float = DEFAULT_REL_TOL) -> bool:
    return support_fn_ball_K(x, K) <= 1.0 + tol


def in_sphere_K(x: npt.ArrayLike, K: SupportSet, tol: float = DEFAULT_REL_TOL) -> bool:
    x = as_vector(x)
    outside = project(x, K.complement())
    return euclidean_norm(outside) <= tol and in_esphere_K(x, K, tol)


def in_ball_K(x: npt.ArrayLike, K: SupportSet, tol: float = DEFAULT_REL_TOL) -> bool:
    x = as_vector(x)
    outside = project(x, K.complement())
    return euclidean_norm(outside) <= tol and in_eball_K(x, K, tol)


def in_topk_ball(x: npt.ArrayLike, k: int, tol: float = DEFAULT_REL_TOL) -> bool:
    return topk_norm(x, k) <= 1.0 + tol


def on_topk_sphere(x: npt.ArrayLike, k: int, tol: float = DEFAULT_REL_TOL) -> bool:
    return abs(topk_norm(x, k) - 1.0) <= tol


def level_curve_approximants(
    x: npt.ArrayLike,
    k: int,
    epsilons: Sequence[float]
) -> List[Tuple[float, Vector, float]]:
    """
    Unit vectors with exactly k nonzero entries converging to x

    x must be a unit vector with l0(x) <= k. For each eps the k - l0(x)
    first zero coordinates of x are set to eps and the result normalized.

    Returns:
        List of (eps, approximant, distance to x)
    """
    x = as_vector(x)
    _check_order(k, x.shape[0], lowest=1)
    current = l0(x)
    if current > k:
        raise CapraError(f"l0(x) = {current} exceeds k = {k}")
    zeros = [i for i in range(x.shape[0]) if x[i] == 0.0][:k - current]

    ladder = []
    for eps in epsilons:
        bumped = np.array(x)
        bumped[zeros] = eps
        approximant = normalization(bumped)
        ladder.append((float(eps), approximant, euclidean_norm(approximant - x)))
    return ladder
