"""
Test script for the sampled conjugacy engine and the sample set builders
"""

import sys
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent))

import numpy as np
import pytest

from src.core.extended_real import POS_INF, XReal, upp_add_array
from src.core.vectors_norms import SupportSet, euclidean_norm, l0
from src.exceptions import (
    BiconjugateCeilingError,
    DimensionMismatchError,
    NaNValueError,
    OrderOutOfRangeError,
    SampleSetError,
)
from src.sampled.conjugacy_engine import (
    Coupling,
    SampledFunction,
    biconjugate,
    capra_convexity_gap,
    capra_coupling,
    characteristic_function,
    conjugate,
    conjugate_argmax,
    conjugate_values,
    coordinate_zeroing,
    coupling_from_scalar,
    dual_bound,
    fenchel_coupling,
    identity_mapping,
    infimal_postcomposition,
    make_one_sided_linear,
    normalization_mapping,
    pairing_matrix,
    reverse_conjugate,
    support_function_sampled,
    zero_mapping,
)
from src.sampled.sample_sets import (
    distinct_rows,
    geometric_ladder,
    l0_maximizer_samples,
    level_set_samples,
    ray_ladder,
    support_vectors,
    uniform_ball,
    uniform_sphere,
)
from src.utils.logger import setup_logger

logger = setup_logger(__name__)


@pytest.fixture
def l0_on_three_points():
    points = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]])
    return SampledFunction.from_callable(points, l0)


def test_capra_coupling_example():
    capra = capra_coupling()
    assert capra.evaluate([3.0, 4.0], [1.0, 0.0]) == XReal(0.6)
    assert capra.evaluate([0.0, 0.0], [5.0, -2.0]) == XReal(0.0)
    # constant along open rays
    assert capra.evaluate([6.0, 8.0], [1.0, 0.0]) == capra.evaluate([3.0, 4.0], [1.0, 0.0])


def test_capra_coupling_at_extreme_scales():
    capra = capra_coupling()
    assert capra.evaluate([1e-200, 0.0], [1.0, 0.0]) == XReal(1.0)
    assert capra.evaluate([5e-324, 0.0], [0.0, 2.0]) == XReal(0.0)
    assert capra.evaluate([-5e-324, 0.0], [3.0, 0.0]) == XReal(-3.0)
    assert float(capra.evaluate([3e200, 4e200], [1.0, 0.0])) == pytest.approx(0.6, rel=1e-15)
    np.testing.assert_array_equal(normalization_mapping()([0.0, 1e-310]), [0.0, 1.0])


def test_coupling_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        fenchel_coupling().matrix([[1.0, 2.0]], [[1.0, 2.0, 3.0]])


def test_reverse_and_negate():
    c = coupling_from_scalar('weighted', lambda x, y: float(x[0] * 2.0 + y[0]))
    primal = np.array([[1.0], [2.0]])
    dual = np.array([[10.0], [20.0], [30.0]])
    np.testing.assert_array_equal(c.reverse().matrix(dual, primal), c.matrix(primal, dual).T)
    np.testing.assert_array_equal(c.negate().matrix(primal, dual), -c.matrix(primal, dual))
    assert c.reverse().metadata['reverse_of'] == 'weighted'


def test_pairing_matrix_is_row_independent():
    rng = np.random.default_rng(5)
    A = rng.standard_normal((40, 7))
    B = rng.standard_normal((30, 7))
    full = pairing_matrix(A, B)
    for i in (0, 17, 39):
        np.testing.assert_array_equal(full[i], pairing_matrix(A[i:i + 1], B)[0])


def test_sampled_function_validation():
    with pytest.raises(SampleSetError):
        SampledFunction(np.array([[1.0, 0.0], [1.0, 0.0]]), [0.0, 1.0])
    with pytest.raises(SampleSetError):
        SampledFunction(np.array([[1.0, 0.0]]), [0.0, 1.0])
    with pytest.raises(SampleSetError):
        SampledFunction(np.zeros((0, 2)), [])
    with pytest.raises(NaNValueError):
        SampledFunction(np.array([[1.0, 0.0]]), [float('nan')])


def test_sampled_function_accessors(l0_on_three_points):
    f = l0_on_three_points
    assert len(f) == 3 and f.dim == 2
    assert f.value_at([1.0, 1.0]) == XReal(2.0)
    assert f.value_at([5.0, 5.0]) == POS_INF
    assert f.xvalues()[0] == XReal(0.0)
    frame = f.as_frame()
    assert list(frame.columns) == ['x0', 'x1', 'value']
    assert frame['value'].tolist() == [0.0, 1.0, 2.0]


def test_conjugate_of_l0_example(l0_on_three_points):
    """l0 on {0, e1, e1 + e2} conjugated at y = (2, 0)"""
    capra = capra_coupling()
    values = conjugate_values(l0_on_three_points, capra, [[2.0, 0.0]])
    assert values[0] == 1.0
    assert conjugate_argmax(l0_on_three_points, capra, [[2.0, 0.0]])[0] == 1
    g = conjugate(l0_on_three_points, capra, [[2.0, 0.0], [0.0, 0.0]])
    assert g.values.tolist() == [1.0, 0.0]


def test_conjugate_lower_addition_with_infinities():
    points = np.array([[1.0], [2.0], [3.0]])
    f = SampledFunction(points, [np.inf, -np.inf, 0.0])
    values = conjugate_values(f, fenchel_coupling(), [[1.0]])
    # the -inf value makes the conjugate +inf, the +inf value contributes -inf
    assert values[0] == np.inf
    f_inf = SampledFunction.constant(points, np.inf)
    assert conjugate_values(f_inf, fenchel_coupling(), [[1.0]])[0] == -np.inf


def test_infimal_postcomposition_example():
    points = np.array([[2.0, 0.0], [1.0, 0.0], [0.0, 0.0]])
    f = SampledFunction.from_callable(points, l0)
    post = infimal_postcomposition(f, normalization_mapping())
    assert post.points.tolist() == [[1.0, 0.0], [0.0, 0.0]]
    assert post.values.tolist() == [1.0, 0.0]


def test_infimal_postcomposition_keeps_minimum_and_off_image():
    points = np.array([[3.0, 0.0], [1.0, 0.0], [0.0, 2.0]])
    f = SampledFunction(points, [5.0, -1.0, 2.0])
    post = infimal_postcomposition(f, normalization_mapping(), off_image_points=[[1.0, 1.0], [1.0, 0.0]])
    assert post.value_at([1.0, 0.0]) == XReal(-1.0)
    assert post.value_at([0.0, 1.0]) == XReal(2.0)
    assert post.value_at([1.0, 1.0]) == POS_INF
    assert len(post) == 3

    zeroed = infimal_postcomposition(f, zero_mapping())
    assert zeroed.points.tolist() == [[0.0, 0.0]]
    assert zeroed.values.tolist() == [-1.0]


def test_one_sided_identity_exact():
    """conjugate under <theta(.), .> = Fenchel conjugate of the postcomposition"""
    rng = np.random.default_rng(2)
    dual = 3.0 * rng.standard_normal((25, 2))
    points = np.array([[2.0, 0.0], [1.0, 0.0], [0.0, 0.0], [0.0, -3.0], [1.5, 2.0]])
    f = SampledFunction(points, [1.0, 0.5, 0.0, -1.0, np.inf])
    for theta in (identity_mapping(), normalization_mapping(), coordinate_zeroing(SupportSet.of(2, [1]))):
        direct = conjugate_values(f, make_one_sided_linear(theta), dual)
        composed = conjugate_values(infimal_postcomposition(f, theta), fenchel_coupling(), dual)
        np.testing.assert_array_equal(direct, composed)


def test_reverse_conjugate_through_theta():
    rng = np.random.default_rng(3)
    g = SampledFunction(rng.standard_normal((12, 3)), rng.standard_normal(12))
    primal = rng.standard_normal((9, 3))
    theta = normalization_mapping()
    direct = reverse_conjugate(g, make_one_sided_linear(theta), primal).values
    composed = conjugate_values(g, fenchel_coupling().reverse(), theta.apply_rows(primal))
    np.testing.assert_array_equal(direct, composed)


def test_characteristic_conjugate_is_support_function():
    rng = np.random.default_rng(4)
    W = rng.standard_normal((10, 3))
    dual = rng.standard_normal((6, 3))
    delta = characteristic_function(W, np.ones(10, dtype=bool))
    grid = conjugate_values(delta, make_one_sided_linear(identity_mapping()).negate(), dual)
    sigma = np.array([support_function_sampled(-W, y) for y in dual])
    np.testing.assert_array_equal(grid, sigma)
    assert support_function_sampled(np.zeros((0, 3)), dual[0]) == -np.inf


def test_biconjugate_never_exceeds_function():
    rng = np.random.default_rng(6)
    points = uniform_ball(30, 3, seed=8, radius=2.0)
    values = rng.standard_normal(30)
    values[:4] = np.inf
    f = SampledFunction(points, values)
    dual = uniform_ball(40, 3, seed=9, radius=4.0)
    for c in (capra_coupling(), fenchel_coupling()):
        bi = biconjugate(f, c, dual)
        assert (bi.values <= f.values + 1e-12).all()

    # one -inf value makes the conjugate +inf and the biconjugate -inf everywhere
    values[4] = -np.inf
    bi = biconjugate(SampledFunction(points, values), capra_coupling(), dual)
    assert (bi.values == -np.inf).all()


def test_biconjugate_rejects_foreign_points(l0_on_three_points):
    with pytest.raises(SampleSetError):
        biconjugate(l0_on_three_points, capra_coupling(), [[1.0, 0.0]], primal_samples=[[0.5, 0.5]])


def test_biconjugate_ceiling_error_on_inconsistent_coupling(l0_on_three_points):
    calls = []

    def drifting(primal, dual):
        calls.append(1)
        # the second evaluation (reverse conjugate) is shifted up by one
        shift = 1.0 if len(calls) == 2 else 0.0
        return pairing_matrix(primal, dual) + shift

    with pytest.raises(BiconjugateCeilingError):
        biconjugate(l0_on_three_points, Coupling('drifting', drifting), [[1.0, 0.0], [0.0, 1.0]])


def test_convexity_gap_of_capra_affine_function():
    points = uniform_sphere(20, 2, seed=1) * np.linspace(0.5, 3.0, 20)[:, None]
    y0 = np.array([[1.5, -0.5]])
    capra = capra_coupling()
    f = SampledFunction(points, capra.matrix(points, y0)[:, 0] - 0.25)
    dual = np.vstack([y0, uniform_ball(10, 2, seed=2)])
    assert abs(capra_convexity_gap(f, capra, dual)) <= 1e-12


def test_l0_has_positive_convexity_gap_for_fenchel():
    points = np.vstack([np.zeros((1, 2)), support_vectors(2)])
    f = SampledFunction.from_callable(points, l0)
    dual = uniform_ball(50, 2, seed=3, radius=2.0)
    assert capra_convexity_gap(f, fenchel_coupling(), dual) > 0.0


def test_dual_bound_characteristic_collapse():
    rng = np.random.default_rng(10)
    points = uniform_ball(20, 2, seed=11)
    f = SampledFunction(points, rng.standard_normal(20))
    mask = np.arange(20) % 3 == 0
    g = characteristic_function(points, mask)
    bound = dual_bound(f, g, capra_coupling(), uniform_ball(15, 2, seed=12, radius=3.0))
    assert bound.lower <= bound.upper
    assert bound.upper == XReal(float(f.values[mask].min()))


def test_dual_bound_needs_common_points(l0_on_three_points):
    other = SampledFunction.constant([[5.0, 5.0]], 0.0)
    with pytest.raises(SampleSetError):
        dual_bound(l0_on_three_points, other, capra_coupling(), [[1.0, 0.0]])


def test_order_reversal():
    rng = np.random.default_rng(13)
    points = uniform_ball(25, 3, seed=14)
    f = SampledFunction(points, rng.standard_normal(25))
    g = SampledFunction(points, upp_add_array(f.values, rng.exponential(1.0, 25)))
    dual = uniform_ball(20, 3, seed=15, radius=2.0)
    capra = capra_coupling()
    assert (conjugate_values(f, capra, dual) >= conjugate_values(g, capra, dual)).all()


def test_sample_set_builders():
    sphere = uniform_sphere(50, 4, seed=0)
    np.testing.assert_allclose(np.linalg.norm(sphere, axis=1), 1.0, rtol=1e-12)
    np.testing.assert_array_equal(sphere, uniform_sphere(50, 4, seed=0))
    ball = uniform_ball(50, 3, seed=1, radius=2.0)
    assert (np.linalg.norm(ball, axis=1) <= 2.0 + 1e-12).all()

    frame = support_vectors(3, sizes=[2])
    assert frame.shape == (12, 3)
    assert (np.count_nonzero(frame, axis=1) == 2).all()
    assert support_vectors(2, signed=False).shape == (3, 2)
    with pytest.raises(OrderOutOfRangeError):
        support_vectors(2, sizes=[3])

    assert geometric_ladder(10.0).tolist() == [1.0, 2.0, 4.0, 8.0, 10.0]
    assert geometric_ladder(8.0).tolist() == [1.0, 2.0, 4.0, 8.0]
    with pytest.raises(SampleSetError):
        geometric_ladder(0.0)
    np.testing.assert_array_equal(ray_ladder([1.0, -2.0], [1.0, 3.0]), [[1.0, -2.0], [3.0, -6.0]])


def test_distinct_rows_on_the_line():
    # R^1 has a two-point sphere, so repeated draws are expected
    sphere = uniform_sphere(8, 1, seed=4)
    assert set(np.abs(sphere[:, 0]).tolist()) == {1.0}
    rows = distinct_rows(sphere)
    assert rows.shape[0] == np.unique(sphere, axis=0).shape[0] <= 2
    np.testing.assert_array_equal(rows[0], sphere[0])
    SampledFunction.constant(np.vstack([s * rows for s in (1.0, 0.5, 2.0, 7.3)]), 0.0)


def test_level_set_samples():
    points = level_set_samples(4, 2, n=40, seed=3)
    assert np.unique(points, axis=0).shape[0] == points.shape[0]
    assert points[0].tolist() == [0.0] * 4
    counts = np.count_nonzero(points, axis=1)
    assert counts.max() <= 2
    norms = np.array([euclidean_norm(p) for p in points[1:]])
    np.testing.assert_allclose(norms, 1.0, rtol=1e-12)
    assert level_set_samples(3, 0).tolist() == [[0.0, 0.0, 0.0]]
    with pytest.raises(OrderOutOfRangeError):
        level_set_samples(2, 3)


def test_l0_maximizer_samples():
    points = l0_maximizer_samples([0.0, 3.0, -4.0])
    assert points.tolist() == [[0.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 0.6, -0.8]]


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
