"""
Sample Sets Module
Deterministic constructors for the finite sample sets fed to the conjugacy engine
"""

import math
from itertools import combinations, product
from typing import Iterable, List, Optional

import numpy as np
import numpy.typing as npt

from src.core.vectors_norms import as_vector, euclidean_norm
from src.exceptions import OrderOutOfRangeError, SampleSetError


def _rng(seed: Optional[int]) -> np.random.Generator:
    return np.random.default_rng(0 if seed is None else seed)


def _check_count(n: int, d: int) -> None:
    if n < 1 or d < 1:
        raise SampleSetError(f"Need n >= 1 and d >= 1, got n={n}, d={d}")


def uniform_sphere(n: int, d: int, seed: Optional[int] = 0) -> np.ndarray:
    """n unit vectors of R^d, uniform on the sphere (normalized Gaussians)."""
    _check_count(n, d)
    rng = _rng(seed)
    points = rng.standard_normal((n, d))
    norms = np.linalg.norm(points, axis=1)
    # a zero Gaussian draw has probability 0; resample it anyway
    while (norms == 0.0).any():
        bad = norms == 0.0
        points[bad] = rng.standard_normal((int(bad.sum()), d))
        norms = np.linalg.norm(points, axis=1)
    return points / norms[:, None]


def uniform_ball(n: int, d: int, seed: Optional[int] = 0, radius: float = 1.0) -> np.ndarray:
    """n points uniform in the Euclidean ball of the given radius."""
    _check_count(n, d)
    rng = _rng(seed)
    directions = uniform_sphere(n, d, seed=int(rng.integers(2**63)))
    radii = radius * rng.random(n) ** (1.0 / d)
    return directions * radii[:, None]


def support_vectors(d: int, sizes: Optional[Iterable[int]] = None, signed: bool = True) -> np.ndarray:
    """
    Normalized signed support vectors e_K / sqrt(|K|)

    Args:
        d: Dimension
        sizes: Cardinalities |K| to include (default 1..d)
        signed: Include every sign pattern on K, not only the positive one

    Returns:
        (n, d) array; rows for one K are consecutive, K in lexicographic order
    """
    if d < 1:
        raise SampleSetError(f"Need d >= 1, got {d}")
    sizes = range(1, d + 1) if sizes is None else sizes
    rows: List[np.ndarray] = []
    for size in sizes:
        if not 1 <= size <= d:
            raise OrderOutOfRangeError(f"Support size {size} outside 1..{d}")
        for subset in combinations(range(d), size):
            patterns = product((1.0, -1.0), repeat=size) if signed else [(1.0,) * size]
            for signs in patterns:
                row = np.zeros(d)
                row[list(subset)] = np.array(signs) / math.sqrt(size)
                rows.append(row)
    if not rows:
        raise SampleSetError("No support vectors for the requested sizes")
    return np.vstack(rows)


def geometric_ladder(lambda_max: float, start: float = 1.0, ratio: float = 2.0) -> np.ndarray:
    """
    start, start*ratio, start*ratio^2, ... up to lambda_max, always ending at lambda_max

    Args:
        lambda_max: Largest value, > 0
        start: First value, > 0
        ratio: Growth factor, > 1
    """
    if lambda_max <= 0 or start <= 0 or ratio <= 1:
        raise SampleSetError(f"Invalid ladder: start={start}, ratio={ratio}, lambda_max={lambda_max}")
    values = []
    current = float(start)
    while current < lambda_max:
        values.append(current)
        current *= ratio
    values.append(float(lambda_max))
    return np.array(values)


def ray_ladder(x: npt.ArrayLike, lambdas: npt.ArrayLike) -> np.ndarray:
    """Rows lambda * x for each lambda."""
    x = as_vector(x)
    lambdas = np.asarray(lambdas, dtype=float).reshape(-1)
    if lambdas.size == 0:
        raise SampleSetError("Empty ladder")
    return lambdas[:, None] * x[None, :]


def level_set_samples(
    d: int,
    k: int,
    n: int = 64,
    seed: Optional[int] = 0,
    include_frame: bool = True
) -> np.ndarray:
    """
    Unit vectors with at most k nonzero coordinates, plus the origin

    Random vectors get a support of random size in 1..k drawn uniformly
    among subsets; with include_frame, the signed support vectors of every
    size <= k (the S_K frame) are added first.

    Returns:
        (m, d) array of pairwise distinct points of the k-level set of l0
    """
    if not 0 <= k <= d:
        raise OrderOutOfRangeError(f"k={k} outside 0..{d}")
    rows = [np.zeros((1, d))]
    if k >= 1:
        if include_frame:
            rows.append(support_vectors(d, sizes=range(1, k + 1)))
        rng = _rng(seed)
        random_rows = np.zeros((n, d))
        for i in range(n):
            size = int(rng.integers(1, k + 1))
            subset = rng.choice(d, size=size, replace=False)
            values = rng.standard_normal(size)
            while euclidean_norm(values) == 0.0:
                values = rng.standard_normal(size)
            random_rows[i, subset] = values / euclidean_norm(values)
        rows.append(random_rows)
    return distinct_rows(np.vstack(rows))


def l0_maximizer_samples(y: npt.ArrayLike) -> np.ndarray:
    """
    Primal points attaining each term of the l0 conjugate at y

    For every l, the projection of y on its l largest-magnitude coordinates,
    normalized; the origin covers the l = 0 term. Duplicates (y with zero
    coordinates) are removed.
    """
    y = as_vector(y)
    d = y.shape[0]
    order = np.argsort(-np.abs(y), kind='stable')
    rows = [np.zeros(d)]
    for size in range(1, d + 1):
        row = np.zeros(d)
        keep = order[:size]
        row[keep] = y[keep]
        norm = euclidean_norm(row)
        if norm > 0.0:
            rows.append(row / norm)
    return distinct_rows(np.vstack(rows))


def distinct_rows(points: np.ndarray) -> np.ndarray:
    """Drop repeated rows, keeping the first occurrence and the order."""
    _, first = np.unique(points, axis=0, return_index=True)
    return points[np.sort(first)]
