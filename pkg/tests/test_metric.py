import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fuzzyprox.berezin import upper_symbol
from fuzzyprox.bridge import combined_seminorm, matrix_pair_seminorm
from fuzzyprox.errors import DimensionMismatchError, InvalidStateError, UnsupportedDegreeError
from fuzzyprox.group import CosetPoint, group_unitary, make_irrep
from fuzzyprox.metric import (
    MatrixSummand,
    State,
    difference_quotient,
    fibonacci_directions,
    from_coords,
    function_lipschitz,
    matrix_lipschitz,
    pnorm,
    random_state,
    smooth_matrix_lipschitz,
    state_metric,
    to_coords,
)
from fuzzyprox.sphere import BandLimited, FunctionSamples, cos_theta, sphere_grid

from conftest import random_hermitian

DENSE = fibonacci_directions(20_000)


def dense_lipschitz(rep, T):
    """Brute-force oracle: operator norm of the commutator on 20k directions."""
    K = np.tensordot(DENSE, rep.generators, axes=1)
    return np.abs(np.linalg.eigvalsh(1j * (K @ T - T @ K))).max()


def test_lipschitz_of_identity_and_generator():
    r = make_irrep(1)
    assert matrix_lipschitz(r, np.eye(2)) == 0
    assert abs(matrix_lipschitz(r, 2 * r.j_z) - 1) < 1e-12


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8])
def test_lipschitz_against_dense_scan(n, rng):
    r = make_irrep(n)
    for _ in range(4):
        T = random_hermitian(rng, n + 1)
        L = matrix_lipschitz(r, T)
        ref = dense_lipschitz(r, T)
        assert ref <= L * (1 + 1e-9)
        assert L <= ref * (1 + 1e-4)


@given(st.integers(1, 5), st.integers(0, 10_000), st.floats(1e-3, 3.0))
def test_difference_quotient_bounded(n, seed, angle):
    rng = np.random.default_rng(seed)
    r = make_irrep(n)
    T = random_hermitian(rng, n + 1)
    axis = rng.standard_normal(3)
    assert difference_quotient(r, T, axis, angle) <= matrix_lipschitz(r, T) * (1 + 1e-6)


def test_difference_quotient_approaches_seminorm(rng):
    r = make_irrep(3)
    T = random_hermitian(rng, 4)
    best = max(difference_quotient(r, T, u, 1e-5) for u in fibonacci_directions(4000))
    assert abs(best - matrix_lipschitz(r, T)) < 1e-3 * best


@given(st.integers(1, 6), st.integers(0, 10_000), st.floats(-3, 3))
def test_lipschitz_is_seminorm(n, seed, c):
    rng = np.random.default_rng(seed)
    r = make_irrep(n)
    S, T = random_hermitian(rng, n + 1), random_hermitian(rng, n + 1)
    LS, LT = matrix_lipschitz(r, S), matrix_lipschitz(r, T)
    assert abs(matrix_lipschitz(r, c * S) - abs(c) * LS) <= 1e-8 * max(1, LS)
    assert matrix_lipschitz(r, S + T) <= LS + LT + 1e-8
    assert matrix_lipschitz(r, S + c * np.eye(n + 1)) == pytest.approx(LS, rel=1e-8)
    assert matrix_lipschitz(r, c * np.eye(n + 1)) == 0


def test_lipschitz_invariant_under_action(rng):
    r = make_irrep(4)
    T = random_hermitian(rng, 5)
    L = matrix_lipschitz(r, T)
    for t, p in rng.uniform([0, 0], [np.pi, 2 * np.pi], size=(6, 2)):
        U = group_unitary(r, CosetPoint(t, p))
        assert abs(matrix_lipschitz(r, U @ T @ U.conj().T) - L) < 1e-6 * L


def test_lipschitz_dimension_check():
    with pytest.raises(DimensionMismatchError):
        matrix_lipschitz(make_irrep(2), np.eye(2))


def test_smooth_lipschitz_gradient(rng):
    r = make_irrep(3)
    x = to_coords(random_hermitian(rng, 4))
    val, g = smooth_matrix_lipschitz(r, from_coords(x, 4), 32.0)
    assert val >= matrix_lipschitz(r, from_coords(x, 4)) * 0.95
    h = 1e-6
    for i in rng.choice(x.size, 5, replace=False):
        e = np.zeros_like(x)
        e[i] = h
        fd = (smooth_matrix_lipschitz(r, from_coords(x + e, 4), 32.0)[0]
              - smooth_matrix_lipschitz(r, from_coords(x - e, 4), 32.0)[0]) / (2 * h)
        assert abs(fd - g[i]) < 1e-6


def test_pnorm_limits():
    a = np.array([1.0, 3.0, 2.0])
    assert pnorm(a, None)[0] == 3.0
    v, g = pnorm(a, 4.0)
    assert abs(v - (a**4).sum() ** 0.25) < 1e-12
    assert np.allclose(g, (a / v) ** 3)
    assert pnorm(np.zeros(3), 8.0)[0] == 0


def test_function_lipschitz_closed_forms():
    g = sphere_grid(6)
    assert function_lipschitz(FunctionSamples(g, np.ones(len(g)))) < 1e-12
    assert abs(function_lipschitz(cos_theta()) - 1) < 1e-4
    assert abs(function_lipschitz(FunctionSamples(g, np.cos(g.theta)), 1) - 1) < 1e-4
    with pytest.raises(UnsupportedDegreeError):
        function_lipschitz(FunctionSamples(g, np.cos(g.theta)), 9)


def test_symbol_of_generator_matches_matrix_seminorm():
    r = make_irrep(1)
    g = sphere_grid(4)
    f = upper_symbol(r, 2 * r.j_z, g)
    assert abs(function_lipschitz(f, 1) - matrix_lipschitz(r, 2 * r.j_z)) < 1e-3


@pytest.mark.parametrize("n", [1, 2, 3])
def test_symbol_map_is_contractive(n, rng):
    r = make_irrep(n)
    g = sphere_grid(2 * n + 2)
    for _ in range(10):
        T = random_hermitian(rng, n + 1)
        assert function_lipschitz(upper_symbol(r, T, g), n) <= matrix_lipschitz(r, T) * (1 + 1e-3)


def test_function_difference_quotients(rng):
    f = BandLimited(3, rng.standard_normal(16))
    L = function_lipschitz(f)
    x = rng.standard_normal((400, 3))
    y = x + 0.05 * rng.standard_normal((400, 3))
    x /= np.linalg.norm(x, axis=1)[:, None]
    y /= np.linalg.norm(y, axis=1)[:, None]

    def angles(u):
        return np.arccos(np.clip(u[:, 2], -1, 1)), np.arctan2(u[:, 1], u[:, 0])

    dist = np.arccos(np.clip((x * y).sum(1), -1, 1))
    q = np.abs(f(*angles(x)) - f(*angles(y))) / dist
    assert q.max() <= L * (1 + 1e-4)


def test_random_state_properties():
    assert np.allclose(random_state(1, 0).density, [[1.0]])
    s = random_state(5, 3)
    assert abs(np.trace(s.density) - 1) < 1e-12
    assert np.linalg.eigvalsh(s.density).min() > -1e-12
    assert np.array_equal(s.density, random_state(5, 3).density)
    assert not np.array_equal(s.density, random_state(5, 4).density)


def test_state_validation():
    with pytest.raises(InvalidStateError):
        State(np.diag([0.7, 0.7]))
    with pytest.raises(InvalidStateError):
        State(np.diag([1.5, -0.5]))
    with pytest.raises(InvalidStateError):
        State(np.array([[0.5, 1.0], [0.0, 0.5]]))


def test_state_metric_vanishes_on_equal_states():
    L = matrix_pair_seminorm(2, 2, 1.4)
    mu = random_state(3, 1)
    assert state_metric(L, mu, mu, "left", "left").value == 0
    assert state_metric(L, mu, mu, "right", "right").value == 0


def test_state_metric_symmetric():
    L = matrix_pair_seminorm(1, 1, 2.0)
    mu, nu = random_state(2, 5), random_state(2, 6)
    a = state_metric(L, mu, nu, "left", "right").value
    b = state_metric(L, nu, mu, "right", "left").value
    assert a > 0 and abs(a - b) < 1e-8


def test_state_metric_unbounded_without_bridge():
    r = make_irrep(1)
    L = combined_seminorm(np.inf, MatrixSummand(r), MatrixSummand(r), None)
    mu, nu = State.tracial(2), State.tracial(2)
    small = state_metric(L, mu, nu, "left", "right", radius=10.0)
    large = state_metric(L, mu, nu, "left", "right", radius=20.0)
    assert small.unbounded and large.unbounded and not small.converged
    assert large.value > 1.9 * small.value


def test_state_metric_certificate_is_feasible():
    L = matrix_pair_seminorm(1, 2, 1.7)
    mu, nu = random_state(2, 7), random_state(3, 8)
    res = state_metric(L, mu, nu, "left", "right")
    S, T = res.pair
    assert L(S, T) <= 1 + 1e-9
    assert abs(abs(mu(S) - nu(T)) - res.value) < 1e-9
