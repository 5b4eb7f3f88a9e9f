import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from detineq.brownian import (
    JITTER,
    GridSpec,
    PathInstance,
    covariance_from_path,
    equivalent_form_check,
    monte_carlo_f,
    sample_path,
    superadditivity_gap,
)
from detineq.dense import is_spd
from detineq.randgen import make_rng


def test_grid_validation():
    with pytest.raises(ValueError):
        GridSpec(0.0, 1.0, 2, 2)
    with pytest.raises(ValueError):
        GridSpec(1.0, 1.0, 0, 2)
    g = GridSpec(1.0, 2.0, 4, 8)
    assert g.lambda1 == 0.25 and g.lambda2 == 0.25
    s = g.nodes()
    assert s.size == 12 and s[3] == 1.0 and s[-1] == 3.0
    assert np.all(np.diff(s) > 0)


def test_one_step_path():
    g = GridSpec(0.5, 1.0, 1, 1)
    p = sample_path(g, 0, seed=3)
    assert p.z.size == 2
    # first value is sqrt(s_1) times a standard normal from the same stream
    xi = make_rng(p.seed).standard_normal(2)
    assert p.z[0] == pytest.approx(math.sqrt(0.5) * xi[0], rel=1e-15)
    assert p.z[1] == pytest.approx(p.z[0] + xi[1], rel=1e-14)


def test_path_determinism():
    g = GridSpec(1.0, 1.0, 5, 5)
    np.testing.assert_array_equal(sample_path(g, 4, seed=7).z, sample_path(g, 4, seed=7).z)
    assert not np.array_equal(sample_path(g, 4, seed=7).z, sample_path(g, 5, seed=7).z)


def test_brownian_marginal_variance():
    g = GridSpec(1.0, 1.0, 4, 4)
    z1 = np.array([sample_path(g, i, seed=11).z[3] for i in range(10_000)])
    assert abs(z1.var() - 1.0) <= 0.05


def test_covariance_kernel():
    g = GridSpec(1.0, 1.0, 1, 1)
    c = covariance_from_path(PathInstance([0.5, -0.3], g))
    jitter = JITTER * 1.5
    np.testing.assert_allclose(c.entries, [[0.5 + jitter, 0.0], [0.0, 0.3 + jitter]], rtol=0, atol=1e-17)


def test_covariance_repeated_value_rescued():
    g = GridSpec(1.0, 1.0, 1, 1)
    c = covariance_from_path(PathInstance([0.7, 0.7], g))
    np.testing.assert_allclose(c.entries, 0.7 + JITTER * 1.7 * np.eye(2), atol=1e-17)
    assert is_spd(c)


@given(st.integers(0, 10_000), st.integers(1, 8), st.integers(1, 8))
def test_covariance_always_spd(sub, n, m):
    p = sample_path(GridSpec(1.0, 1.0, n, m), sub)
    assert is_spd(covariance_from_path(p))


def test_decoupled_path_has_zero_gap():
    g = GridSpec(1.0, 1.0, 3, 2)
    p = PathInstance([0.2, 0.5, 0.1, -0.4, -0.9], g)
    r = superadditivity_gap(p)
    assert abs(r.gap) <= 1e-8
    assert math.isclose(r.f_full, r.f_1 + r.f_2 + r.gap, rel_tol=0, abs_tol=1e-14)


def test_zero_lambda():
    p = sample_path(GridSpec(1.0, 1.0, 4, 4), 0)
    r = superadditivity_gap(p, lambda_scale=0.0)
    assert r.gap == 0.0 and r.f_full == 0.0 and r.f_1 == 0.0 and r.f_2 == 0.0


def test_closed_form_expectation_one_point():
    # E exp(-lam W^2) for W ~ N(0, v) equals (1 + 2 lam v)^{-1/2}
    g = GridSpec(1.0, 1.0, 1, 1)
    v, lam = 0.8, 1.0
    r = superadditivity_gap(PathInstance([v, -0.5], g))
    assert r.f_1 == pytest.approx(-0.5 * math.log(1 + 2 * lam * (v + JITTER * 1.8)), rel=1e-14)
    w = np.random.default_rng(0).normal(0.0, math.sqrt(v), 200_000)
    assert math.exp(r.f_1) == pytest.approx(np.mean(np.exp(-lam * w**2)), abs=5e-3)


def test_pathwise_superadditivity_and_cross_check():
    g = GridSpec(1.0, 1.0, 16, 16)
    for i in range(100):
        p = sample_path(g, i, seed=7)
        r = superadditivity_gap(p)
        assert r.gap >= -1e-9 * (1 + abs(r.f_full) + abs(r.f_1 + r.f_2))
        assert abs(r.gap - 0.5 * equivalent_form_check(p).gap) <= 1e-10
        assert math.isclose(r.f_full, r.f_1 + r.f_2 + r.gap, rel_tol=0, abs_tol=1e-12)


@given(st.integers(0, 10_000), st.integers(1, 6), st.integers(1, 6), st.sampled_from([1.0, 2.0]))
def test_convention_invariance(sub, n, m, factor):
    p = sample_path(GridSpec(1.0, 0.5, n, m), sub, seed=1)
    r = superadditivity_gap(p, factor=factor)
    assert r.holds


def test_monte_carlo_f_is_finite_and_negative():
    f = monte_carlo_f(1.0, 8, 50, seed=0)
    assert math.isfinite(f) and f < 0
