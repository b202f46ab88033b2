import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import sph_harm_y

from fuzzyprox.errors import InvalidParameterError, UnsupportedDegreeError
from fuzzyprox.sphere import (
    BandLimited,
    FunctionSamples,
    cos_theta,
    fit_band_limited,
    harmonic_index,
    harmonic_matrix,
    maximize_on_sphere,
    real_harmonics,
    sphere_grid,
    sup_grid,
)


@pytest.mark.parametrize("scheme", ["gauss", "lobatto"])
@pytest.mark.parametrize("degree", [0, 1, 4, 9, 18])
def test_grid_exactness(degree, scheme):
    g = sphere_grid(degree, scheme)
    assert abs(g.weights.sum() - 1) < 1e-12 and g.weights.min() > 0
    assert g.exact_degree == degree
    for l in range(1, degree + 1):
        for m in range(-l, l + 1):
            assert abs(g.integrate(sph_harm_y(l, m, g.theta, g.phi))) < 1e-10


@pytest.mark.parametrize("degree", [0, 1, 3, 8, 16])
def test_harmonic_recurrence_matches_scipy(degree, rng):
    theta = np.concatenate([[0.0, np.pi, 1e-12], rng.uniform(0, np.pi, 200)])
    phi = rng.uniform(0, 2 * np.pi, theta.size)
    idx = np.array(harmonic_index(degree))
    ref = sph_harm_y(idx[:, 0], idx[:, 1], theta[:, None], phi[:, None])
    assert np.abs(harmonic_matrix(degree, theta, phi) - ref).max() < 1e-12


def test_grid_closed_forms():
    g = sphere_grid(4)
    assert abs(g.integrate(np.ones(len(g))) - 1) < 1e-14
    assert abs(g.integrate(np.cos(g.theta))) < 1e-14
    assert abs(g.integrate(np.cos(g.theta) ** 2) - 1 / 3) < 1e-14


def test_grid_errors():
    with pytest.raises(UnsupportedDegreeError):
        sphere_grid(10_000)
    with pytest.raises(InvalidParameterError):
        sphere_grid(-1)
    with pytest.raises(InvalidParameterError):
        sphere_grid(4, "lebedev")


def test_sup_grid_contains_poles():
    g = sup_grid(3)
    assert g.theta[0] == 0 and abs(g.theta[-1] - np.pi) < 1e-14


def test_real_harmonics_orthonormal():
    g = sphere_grid(12)
    R = real_harmonics(5, g.theta, g.phi)
    gram = R.T @ (g.weights[:, None] * R)
    assert np.abs(gram - np.eye(36)).max() < 1e-12
    assert np.allclose(R[:, 0], 1.0)


@given(st.integers(0, 6), st.integers(0, 10_000))
def test_fit_recovers_expansion(degree, seed):
    p = np.random.default_rng(seed).standard_normal((degree + 1) ** 2)
    f = BandLimited(degree, p)
    g = sphere_grid(2 * degree + 2)
    assert np.allclose(fit_band_limited(f.sample(g), degree).params, p, atol=1e-10)


def test_fit_needs_exactness():
    g = sphere_grid(4)
    with pytest.raises(UnsupportedDegreeError):
        fit_band_limited(FunctionSamples(g, np.zeros(len(g))), 3)


def test_cos_theta_and_gradient():
    f = cos_theta()
    t = np.linspace(0, np.pi, 50)
    assert np.allclose(f(t, 0 * t), np.cos(t), atol=1e-14)
    # |grad cos theta| = |sin theta|
    assert np.allclose(f.gradient_norm(t, 0 * t), np.abs(np.sin(t)), atol=1e-12)


def test_gradient_matches_finite_differences(rng):
    f = BandLimited(4, rng.standard_normal(25))
    t, p, h = 1.1, 0.7, 1e-6
    dt = (f(np.array([t + h]), np.array([p])) - f(np.array([t - h]), np.array([p]))) / (2 * h)
    dp = (f(np.array([t]), np.array([p + h])) - f(np.array([t]), np.array([p - h]))) / (2 * h)
    expect = np.hypot(dt, dp / np.sin(t))[0]
    assert abs(f.gradient_norm(np.array([t]), np.array([p]))[0] - expect) < 1e-7


def test_maximize_never_below_dense_scan(rng):
    tt, pp = np.meshgrid(np.linspace(0, np.pi, 181), np.linspace(0, 2 * np.pi, 361))
    for degree in (2, 5):
        f = BandLimited(degree, rng.standard_normal((degree + 1) ** 2))
        val, pt = maximize_on_sphere(f, sup_grid(degree + 2))
        dense = f(tt.ravel(), pp.ravel()).max()
        assert val >= dense - 1e-9
        assert abs(f(np.array([pt.theta]), np.array([pt.phi]))[0] - val) < 1e-12
