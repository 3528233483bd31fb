"""
Conjugacy Engine Module
Fenchel-Moreau conjugacy over arbitrary couplings, evaluated exactly on
finite sample sets

Every sup or inf over R^d is replaced by an extremum over the sample points
supplied by the caller. At that level the identities between conjugates are
exact: both sides reduce to the same finite extremum.
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
import numpy.typing as npt
import pandas as pd

from src.core.extended_real import (
    XReal,
    check_no_nan,
    low_add_array,
    upp_add_array,
    xreal,
)
from src.core.vectors_norms import SupportSet, normalization
from src.exceptions import (
    BiconjugateCeilingError,
    DimensionMismatchError,
    DualBoundViolationError,
    SampleSetError,
)
from src.utils.logger import setup_logger

logger = setup_logger(__name__)

CEILING_SLACK = 1e-12
KEY_DIGITS = 12


def as_points(points: npt.ArrayLike, what: str = 'samples') -> np.ndarray:
    """
    Validate a sample set as an (n, d) float array with n >= 1 and no NaN
    """
    array = np.array(points, dtype=float)
    if array.ndim == 1:
        array = array.reshape(1, -1)
    if array.ndim != 2 or array.shape[0] < 1 or array.shape[1] < 1:
        raise SampleSetError(f"{what} must be a nonempty (n, d) array, got shape {array.shape}")
    check_no_nan(array, what)
    array.flags.writeable = False
    return array


def pairing_matrix(primal: np.ndarray, dual: np.ndarray) -> np.ndarray:
    """
    <p_i, q_j> for every row pair

    Each entry is reduced on its own, so its value does not depend on which
    other rows are present (a BLAS product may round by block).
    """
    return (primal[:, None, :] * dual[None, :, :]).sum(axis=-1)


@dataclass(frozen=True)
class SampledFunction:
    """
    A function known on finitely many distinct points.

    values[i] is the extended-real value at points[i]; +inf / -inf are
    stored as IEEE infinities.
    """

    points: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        points = as_points(self.points, 'function points')
        values = check_no_nan(np.array(self.values, dtype=float).reshape(-1), 'function values')
        if values.shape[0] != points.shape[0]:
            raise SampleSetError(f"{points.shape[0]} points but {values.shape[0]} values")
        if np.unique(points, axis=0).shape[0] != points.shape[0]:
            raise SampleSetError("Sample points must be pairwise distinct")
        values.flags.writeable = False
        object.__setattr__(self, 'points', points)
        object.__setattr__(self, 'values', values)

    @classmethod
    def from_callable(cls, points: npt.ArrayLike, fn: Callable[[np.ndarray], float]) -> 'SampledFunction':
        points = as_points(points)
        return cls(points, np.array([float(xreal(fn(p))) for p in points]))

    @classmethod
    def constant(cls, points: npt.ArrayLike, value: float) -> 'SampledFunction':
        points = as_points(points)
        return cls(points, np.full(points.shape[0], float(value)))

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.points.shape[0]

    def value_at(self, x: npt.ArrayLike, default: float = np.inf) -> XReal:
        """Value at a point; points outside the sample get `default` (+inf)."""
        x = np.asarray(x, dtype=float)
        hits = np.flatnonzero((self.points == x).all(axis=1))
        return XReal(self.values[hits[0]] if hits.size else default)

    def xvalues(self) -> List[XReal]:
        return [XReal(v) for v in self.values]

    def as_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.points, columns=[f"x{i}" for i in range(self.dim)])
        frame['value'] = self.values
        return frame


@dataclass(frozen=True)
class MappingTheta:
    """A deterministic mapping theta: W -> X applied row by row."""

    name: str
    apply: Callable[[np.ndarray], np.ndarray]

    def __call__(self, w: npt.ArrayLike) -> np.ndarray:
        return np.asarray(self.apply(np.asarray(w, dtype=float)), dtype=float)

    def apply_rows(self, points: npt.ArrayLike) -> np.ndarray:
        points = as_points(points)
        return np.vstack([self(row) for row in points])


def identity_mapping() -> MappingTheta:
    return MappingTheta('identity', lambda w: np.array(w))


def normalization_mapping() -> MappingTheta:
    return MappingTheta('normalization', lambda w: np.array(normalization(w)))


def coordinate_zeroing(K: SupportSet) -> MappingTheta:
    """Keep the coordinates in K, zero the others (w -> w_K)."""
    keep = np.zeros(K.dim, dtype=bool)
    keep[list(K.indices)] = True
    return MappingTheta(f"zeroing{K.indices}", lambda w: np.where(keep, w, 0.0))


def zero_mapping() -> MappingTheta:
    return MappingTheta('zero', lambda w: np.zeros_like(w))


@dataclass(frozen=True)
class Coupling:
    """
    Coupling c(x, y) -> [-inf, +inf] between a primal and a dual space.

    `pairwise` evaluates c on every (primal row, dual row) pair at once;
    `evaluate` is the scalar form. reverse() swaps the arguments and
    negate() takes the opposite.
    """

    name: str
    pairwise: Callable[[np.ndarray, np.ndarray], np.ndarray]
    primal_space: str = 'R^d'
    dual_space: str = 'R^d'
    metadata: Dict[str, str] = field(default_factory=dict)

    def evaluate(self, x: npt.ArrayLike, y: npt.ArrayLike) -> XReal:
        value = self.matrix(np.atleast_2d(x), np.atleast_2d(y))[0, 0]
        return XReal(value)

    def matrix(self, primal: npt.ArrayLike, dual: npt.ArrayLike) -> np.ndarray:
        primal = as_points(primal, 'primal samples')
        dual = as_points(dual, 'dual samples')
        if primal.shape[1] != dual.shape[1]:
            raise DimensionMismatchError(
                f"Coupling '{self.name}' cannot pair R^{primal.shape[1]} with R^{dual.shape[1]}"
            )
        return check_no_nan(self.pairwise(primal, dual), f"coupling '{self.name}' values")

    def reverse(self) -> 'Coupling':
        return Coupling(
            name=f"reverse({self.name})",
            pairwise=lambda y, x: self.pairwise(x, y).T,
            primal_space=self.dual_space,
            dual_space=self.primal_space,
            metadata={**self.metadata, 'reverse_of': self.name},
        )

    def negate(self) -> 'Coupling':
        return Coupling(
            name=f"-{self.name}",
            pairwise=lambda x, y: -self.pairwise(x, y),
            primal_space=self.primal_space,
            dual_space=self.dual_space,
            metadata={**self.metadata, 'negation_of': self.name},
        )


def coupling_from_scalar(name: str, fn: Callable[[np.ndarray, np.ndarray], float]) -> Coupling:
    """Wrap a scalar c(x, y) into a Coupling (evaluated pair by pair)."""
    def pairwise(primal, dual):
        return np.array([[float(xreal(fn(x, y))) for y in dual] for x in primal])

    return Coupling(name, pairwise)


def make_one_sided_linear(theta: MappingTheta) -> Coupling:
    """c_theta(w, y) = <theta(w), y>."""
    return Coupling(
        name=f"one_sided_linear({theta.name})",
        pairwise=lambda w, y: pairing_matrix(theta.apply_rows(w), y),
        metadata={'theta': theta.name},
    )


def fenchel_coupling() -> Coupling:
    coupling = make_one_sided_linear(identity_mapping())
    return Coupling('fenchel', coupling.pairwise, metadata={'theta': 'identity'})


def capra_coupling() -> Coupling:
    """<x, y> / ||x|| for x != 0 and 0 at x = 0: the Fenchel coupling after normalization."""
    coupling = make_one_sided_linear(normalization_mapping())
    return Coupling('capra', coupling.pairwise, metadata={'theta': 'normalization'})


def _conjugate_matrix(points: np.ndarray, values: np.ndarray, c: Coupling, targets: np.ndarray) -> np.ndarray:
    # rows: source points, columns: targets
    return low_add_array(c.matrix(points, targets), -values[:, None])


def conjugate_values(f: SampledFunction, c: Coupling, dual_samples: npt.ArrayLike) -> np.ndarray:
    """f^c on dual_samples as a raw array (duplicates allowed)."""
    return _conjugate_matrix(f.points, f.values, c, as_points(dual_samples, 'dual samples')).max(axis=0)


def conjugate_argmax(f: SampledFunction, c: Coupling, dual_samples: npt.ArrayLike) -> np.ndarray:
    """Index of the primal point attaining f^c(y); first index wins on ties."""
    return np.argmax(_conjugate_matrix(f.points, f.values, c, as_points(dual_samples, 'dual samples')), axis=0)


def conjugate(f: SampledFunction, c: Coupling, dual_samples: npt.ArrayLike) -> SampledFunction:
    """
    c-Fenchel-Moreau conjugate restricted to the samples

    f^c(y) = max over the points x of f of c(x, y) lower-plus (-f(x)). The
    result is a lower bound of the conjugate over the whole space and is
    exact when f is +inf outside its sample points.

    Args:
        f: Sampled primal function
        c: Coupling between the primal and the dual space
        dual_samples: Points y where the conjugate is evaluated

    Returns:
        SampledFunction on dual_samples
    """
    dual = as_points(dual_samples, 'dual samples')
    return SampledFunction(dual, conjugate_values(f, c, dual))


def reverse_conjugate(g: SampledFunction, c: Coupling, primal_samples: npt.ArrayLike) -> SampledFunction:
    """g^{c'}(x) = max over y of c(x, y) lower-plus (-g(y))."""
    return conjugate(g, c.reverse(), primal_samples)


def _rows_in(rows: np.ndarray, table: np.ndarray) -> np.ndarray:
    return np.array([bool((table == row).all(axis=1).any()) for row in rows])


def biconjugate(
    f: SampledFunction,
    c: Coupling,
    dual_samples: npt.ArrayLike,
    primal_samples: Optional[npt.ArrayLike] = None,
    slack: float = CEILING_SLACK
) -> SampledFunction:
    """
    c-Fenchel-Moreau biconjugate restricted to the samples

    The result never exceeds f; this is enforced as a postcondition with an
    absolute slack of `slack` times the magnitude of the coupling values.

    Args:
        f: Sampled primal function
        c: Coupling
        dual_samples: Dual points used for the inner conjugate
        primal_samples: Points where the biconjugate is evaluated, a subset
            of f.points (default: all of them)
        slack: Rounding allowance of the ceiling check

    Returns:
        SampledFunction on primal_samples

    Raises:
        SampleSetError: If primal_samples is not contained in f.points
        BiconjugateCeilingError: If the ceiling check fails
    """
    primal = f.points if primal_samples is None else as_points(primal_samples, 'primal samples')
    if not _rows_in(primal, f.points).all():
        raise SampleSetError("Biconjugate evaluation points must be sample points of f")

    f_c = conjugate(f, c, dual_samples)
    result = reverse_conjugate(f_c, c, primal)

    scale = max(1.0, float(np.abs(c.matrix(f.points, f_c.points)).max()))
    reference = np.array([f.value_at(x).value for x in primal])
    with np.errstate(invalid='ignore'):
        excess = result.values - reference
    finite = np.isfinite(result.values) & np.isfinite(reference)
    violated = np.where(finite, excess > slack * scale, result.values > reference)
    if violated.any():
        worst = int(np.flatnonzero(violated)[0])
        logger.error(
            f"Biconjugate ceiling violated at {primal[worst].tolist()}: "
            f"{result.values[worst]!r} > {reference[worst]!r}"
        )
        raise BiconjugateCeilingError(
            f"biconjugate exceeds f at {primal[worst].tolist()} "
            f"({result.values[worst]!r} > {reference[worst]!r})"
        )
    return result


def capra_convexity_gap(f: SampledFunction, c: Coupling, dual_samples: npt.ArrayLike) -> float:
    """max of f - f^{cc'} over the samples (0 when f is c-convex at the sampled level)."""
    bi = biconjugate(f, c, dual_samples)
    finite = np.isfinite(f.values) & np.isfinite(bi.values)
    with np.errstate(invalid='ignore'):
        gaps = np.where(finite, f.values - bi.values, 0.0)
    gaps = np.where(~finite & (bi.values < f.values), np.inf, gaps)
    return float(gaps.max())


@dataclass(frozen=True)
class DualBound:
    lower: XReal
    upper: XReal


def dual_bound(
    f: SampledFunction,
    g: SampledFunction,
    c: Coupling,
    dual_samples: npt.ArrayLike,
    slack: float = CEILING_SLACK
) -> DualBound:
    """
    Weak duality bounds for inf (f + g)

    lower = max over y of (-f^c(y)) lower-plus (-g^{-c}(y)),
    upper = min over x of f(x) upper-plus g(x). lower <= upper is checked.

    Args:
        f, g: Sampled functions on the same primal points
        c: Coupling
        dual_samples: Dual points

    Returns:
        DualBound(lower, upper)
    """
    if f.points.shape != g.points.shape or not np.array_equal(f.points, g.points):
        raise SampleSetError("dual_bound needs f and g sampled on the same primal points")

    f_c = conjugate_values(f, c, dual_samples)
    g_minus_c = conjugate_values(g, c.negate(), dual_samples)
    lower = float(low_add_array(-f_c, -g_minus_c).max())
    upper = float(upp_add_array(f.values, g.values).min())

    scale = max(1.0, float(np.abs(c.matrix(f.points, dual_samples)).max()))
    if lower > upper and not (np.isfinite(lower) and np.isfinite(upper) and lower - upper <= slack * scale):
        raise DualBoundViolationError(f"dual lower bound {lower!r} exceeds primal value {upper!r}")
    return DualBound(XReal(lower), XReal(upper))


def characteristic_function(points: npt.ArrayLike, member_mask: npt.ArrayLike) -> SampledFunction:
    """delta_X on the samples: 0 where member_mask holds, +inf elsewhere."""
    points = as_points(points)
    mask = np.asarray(member_mask, dtype=bool).reshape(-1)
    return SampledFunction(points, np.where(mask, 0.0, np.inf))


def support_function_sampled(points: npt.ArrayLike, y: npt.ArrayLike) -> float:
    """sigma_X(y) = max over the sample points x of <x, y> (-inf for an empty X)."""
    points = np.asarray(points, dtype=float)
    if points.size == 0:
        return -np.inf
    return float(pairing_matrix(np.atleast_2d(points), np.atleast_2d(np.asarray(y, dtype=float))).max())


def _image_key(point: np.ndarray) -> Tuple[float, ...]:
    # 12 significant digits; -0.0 folded onto 0.0
    return tuple(float(f"{v:.{KEY_DIGITS - 1}e}") + 0.0 for v in point)


def infimal_postcomposition(
    f: SampledFunction,
    theta: MappingTheta,
    off_image_points: Optional[npt.ArrayLike] = None
) -> SampledFunction:
    """
    (theta |> f)(x) = inf { f(w) : theta(w) = x }

    Images are grouped after rounding to 12 significant digits, so that
    theta(lambda w) collide for the normalization mapping despite floating
    error. Each group is represented by the image of its minimizing sample
    (first one on ties). Optional off-image points are added with value +inf.

    Returns:
        SampledFunction supported on theta(W) (plus off-image points)
    """
    images = theta.apply_rows(f.points)
    groups: Dict[Tuple[float, ...], int] = {}
    order: List[Tuple[float, ...]] = []
    for index, image in enumerate(images):
        key = _image_key(image)
        if key not in groups:
            groups[key] = index
            order.append(key)
        elif f.values[index] < f.values[groups[key]]:
            groups[key] = index

    points = [images[groups[key]] for key in order]
    values = [f.values[groups[key]] for key in order]

    if off_image_points is not None:
        for point in as_points(off_image_points, 'off-image points'):
            if _image_key(point) not in groups:
                points.append(point)
                values.append(np.inf)

    logger.debug(f"infimal postcomposition by {theta.name}: {len(f)} samples -> {len(order)} images")
    return SampledFunction(np.vstack(points), np.array(values))
