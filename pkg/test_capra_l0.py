"""
Test script for the closed-form Capra conjugates of l0 and of its level sets
"""

import math
import sys
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent))

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from src.closed_form.capra_l0 import (
    biconj_l0,
    biconj_l0_search,
    biconj_levelset_indicator,
    build_conjugate_report,
    conditioning,
    conj_l0,
    conj_levelset_indicator,
    fenchel_biconj_l0,
    fenchel_conj_l0,
    l0_on_sphere_via_fenchel,
    phi_ray,
    phi_ray_rewritten,
    ray_base,
)
from src.core.extended_real import POS_INF, ZERO
from src.core.vectors_norms import l0, topk_norm
from src.exceptions import CapraError, NotOnSphereError
from src.sampled.conjugacy_engine import SampledFunction, capra_coupling, conjugate_values
from src.sampled.sample_sets import l0_maximizer_samples, level_set_samples
from src.utils.logger import setup_logger

logger = setup_logger(__name__)

entry = st.one_of(
    st.just(0.0),
    st.floats(min_value=0.1, max_value=10.0),
    st.floats(min_value=-10.0, max_value=-0.1),
)
vectors = st.lists(entry, min_size=1, max_size=5).map(np.array)


def test_conj_l0_examples():
    assert conj_l0([2.0, 0.0]) == 1.0
    assert conj_l0([10.0, 10.0]) == pytest.approx(math.sqrt(200.0) - 2.0, rel=1e-15)
    assert conj_l0([0.0, 0.0, 0.0]) == 0.0
    assert conj_l0([0.5, -0.5]) == 0.0


def test_conj_levelset_is_topk():
    y = [3.0, 0.0, -4.0]
    assert [conj_levelset_indicator(y, k) for k in range(4)] == [0.0, 4.0, 5.0, 5.0]


def test_biconj_levelset_indicator():
    assert biconj_levelset_indicator([1.0, 0.0], 1) == ZERO
    assert biconj_levelset_indicator([1.0, 1.0], 1) == POS_INF
    assert biconj_levelset_indicator([0.0, 0.0], 0) == ZERO


def test_fenchel_side_is_trivial():
    assert fenchel_conj_l0([0.0, 0.0]) == ZERO
    assert fenchel_conj_l0([0.0, 1e-300]) == POS_INF
    assert fenchel_biconj_l0([3.0, 0.0, -4.0]) == ZERO


def test_phi_ray_example():
    assert phi_ray([1.0, 0.0], 10.0) == 1.0
    assert phi_ray_rewritten([1.0, 0.0], 10.0) == 1.0
    assert phi_ray([3.0, 0.0, -4.0], 1.0) == 2.0
    with pytest.raises(CapraError):
        phi_ray([0.0, 0.0], 1.0)
    with pytest.raises(CapraError):
        phi_ray([1.0, 0.0], 0.0)


@given(vectors, st.floats(min_value=0.01, max_value=1e4))
@settings(max_examples=200)
def test_phi_ray_forms_agree(x, lam):
    if not x.any():
        return
    scale = max(1.0, lam * float(np.linalg.norm(x)))
    assert abs(phi_ray(x, lam) - phi_ray_rewritten(x, lam)) <= 1e-12 * scale


@given(vectors)
@settings(max_examples=100)
def test_phi_ray_nondecreasing_and_bounded(x):
    if not x.any():
        return
    lambdas = [0.1, 1.0, 10.0, 100.0, 1e3, 1e4, 1e5]
    values = [phi_ray(x, lam) for lam in lambdas]
    target = l0(x)
    for lam, a, b in zip(lambdas, values, values[1:]):
        assert a <= b + 1e-9 * lam
    norm = float(np.linalg.norm(x))
    for lam, value in zip(lambdas, values):
        assert value <= target + 1e-12 * max(1.0, lam * norm)


def test_phi_ray_reaches_l0_above_suggested_lambda():
    x = np.array([3.0, 0.0, -4.0])
    info = conditioning(x)
    assert info.ill_conditioned is False
    assert info.min_norm_gap == 1.0
    assert info.suggested_lambda_max == 1.0
    assert phi_ray(x, 2.0 * info.suggested_lambda_max) == 2.0


def test_conditioning_flags_near_ties():
    assert conditioning([1.0, 1.0 + 1e-12]).ill_conditioned is True
    assert conditioning([1.0, -1.0]).ill_conditioned is True
    assert conditioning([0.0, 0.0]).suggested_lambda_max is None
    assert conditioning([5.0, 1.0]).ill_conditioned is False


def test_biconj_l0_example():
    value = biconj_l0([3.0, 0.0, -4.0], restarts=4, seed=1)
    assert value == pytest.approx(2.0, abs=1e-6)


def test_conj_l0_at_extreme_scales():
    assert conj_l0([1e200, 0.0]) == 1e200
    assert conj_l0([1e-200, 0.0]) == 0.0
    assert conj_l0([1e300, -1e300]) == pytest.approx(math.sqrt(2.0) * 1e300, rel=1e-15)


def test_ray_base():
    np.testing.assert_array_equal(ray_base([3.0, 0.0, -4.0]), [0.375, 0.0, -0.5])
    np.testing.assert_array_equal(ray_base([5e-324, 0.0]), [0.5, 0.0])
    np.testing.assert_array_equal(ray_base([0.0, 0.0]), [0.0, 0.0])
    assert ray_base([0.75, 0.1]).tolist() == [0.75, 0.1]


def test_biconj_l0_is_constant_on_rays():
    x = np.array([1.0, -2.0, 0.0, 0.5])
    reference = biconj_l0_search(x, restarts=2, seed=11)
    assert reference.value == pytest.approx(3.0, abs=1e-6)
    for exponent in (-600, -3, 1, 7, 600):
        assert biconj_l0_search(2.0 ** exponent * x, restarts=2, seed=11) == reference
    for lam in (7.3, 0.37, 1e-150, -1.0):
        value = biconj_l0(lam * x, restarts=2, seed=11)
        assert value == pytest.approx(reference.value, abs=1e-6)
    assert biconj_l0([1e-200, 0.0], restarts=2, seed=3) == pytest.approx(1.0, abs=1e-6)


def test_biconj_l0_matches_l0_on_separated_vectors():
    rng = np.random.default_rng(21)
    for d in (2, 3, 4):
        for size in range(1, d + 1):
            x = np.zeros(d)
            support = rng.choice(d, size=size, replace=False)
            x[support] = (1.0 + np.arange(size)) * 0.5 * np.where(rng.random(size) < 0.5, -1.0, 1.0)
            search = biconj_l0_search(x, restarts=2, seed=int(rng.integers(2**32)))
            assert abs(search.value - l0(x)) <= 1e-4
            assert search.value <= l0(x) + 1e-8
            assert all(phi <= search.value for _, phi in search.ray_values)


def test_biconj_l0_search_details():
    search = biconj_l0_search([0.0, 0.0])
    assert search.value == 0.0
    assert search.best_restart is None

    search = biconj_l0_search([1.0, -2.0], lambda_max=64.0, restarts=3, seed=5)
    assert [lam for lam, _ in search.ray_values] == [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0]
    assert search.evaluations > len(search.ray_values)
    assert search.value >= search.ray_value

    with pytest.raises(CapraError):
        biconj_l0_search([1.0], lambda_max=0.0)
    with pytest.raises(CapraError):
        biconj_l0_search([1.0], restarts=-1)


def test_biconj_l0_search_is_deterministic_across_workers():
    x = [0.3, -1.2, 0.0, 2.5]
    serial = biconj_l0_search(x, restarts=6, seed=9, workers=1)
    threaded = biconj_l0_search(x, restarts=6, seed=9, workers=3)
    assert serial == threaded


def test_l0_on_sphere_via_fenchel():
    value = l0_on_sphere_via_fenchel([0.6, 0.8, 0.0], restarts=2, seed=3)
    assert value == pytest.approx(2.0, abs=1e-6)
    with pytest.raises(NotOnSphereError):
        l0_on_sphere_via_fenchel([1.0, 1.0])


def test_grid_conjugate_of_levelset_matches_closed_form():
    capra = capra_coupling()
    probes = np.array([[1.0, 0.0, 0.0], [0.0, -2.0, 0.0], [1.5, 1.5, 1.5], [1.5, -1.5, 1.5]])
    for k in range(4):
        W = level_set_samples(3, k, n=32, seed=k)
        grid = conjugate_values(SampledFunction.constant(W, 0.0), capra, probes)
        for y, value in zip(probes, grid):
            closed = conj_levelset_indicator(y, k)
            assert abs(value - closed) <= 1e-12 * max(1.0, closed)


def test_grid_conjugate_of_l0_matches_closed_form():
    capra = capra_coupling()
    rng = np.random.default_rng(17)
    for _ in range(20):
        y = 3.0 * rng.standard_normal(3)
        f = SampledFunction.from_callable(l0_maximizer_samples(y), l0)
        grid = float(conjugate_values(f, capra, y)[0])
        assert abs(grid - conj_l0(y)) <= 1e-10


def test_conjugate_report():
    report = build_conjugate_report([3.0, 0.0, -4.0], 'biconj_l0', closed_form=2.0, oracle=1.99999)
    data = report.to_dict()
    assert data['point'] == [3.0, 0.0, -4.0]
    assert data['gap'] == pytest.approx(1e-5)
    assert data['suggested_lambda_max'] == 1.0
    assert data['ill_conditioned'] is False

    infinite = build_conjugate_report([1.0, 1.0], 'levelset', closed_form=math.inf, oracle=math.inf, k=1)
    assert infinite.gap == 0.0
    assert infinite.to_dict()['closed_form'] == '+inf'

    no_oracle = build_conjugate_report([1.0], 'conj_l0', closed_form=conj_l0([1.0]))
    assert no_oracle.gap is None and no_oracle.oracle is None


def test_topk_bounds_conj_l0():
    """conj_l0(y) >= ||y||_(k) - k for every k"""
    rng = np.random.default_rng(31)
    for _ in range(50):
        y = 2.0 * rng.standard_normal(4)
        value = conj_l0(y)
        assert value >= 0.0
        assert all(value >= topk_norm(y, k) - k for k in range(5))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
