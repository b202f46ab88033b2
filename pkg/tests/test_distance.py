import numpy as np
import pytest

from fuzzyprox.berezin import berezin_channel, symbol_values
from fuzzyprox.bridge import matrix_pair_seminorm
from fuzzyprox.distance import (
    Constants,
    compress,
    gambit_bound,
    hausdorff_estimate,
    prox_upper_bound,
    pushforward_state,
    sample_states,
)
from fuzzyprox.errors import DimensionMismatchError, InvalidStateError, MissingConstantsError
from fuzzyprox.group import coherent_vectors
from fuzzyprox.metric import State, random_state, state_metric
from fuzzyprox.sphere import sphere_grid

from conftest import random_complex, random_hermitian

# spin-half constants: delta_1 = 2/3 and gamma^A_1 = 2/3, gamma^B_1 = 1
SPIN_HALF = Constants(1, 2 / 3, 2 / 3, 1.0)


def test_compress_examples(rng):
    S = random_hermitian(rng, 4)
    assert np.abs(compress(3, 3, S, S)).max() < 1e-12
    assert np.allclose(compress(2, 3, np.eye(3), np.zeros((4, 4))), np.eye(6), atol=1e-12)
    with pytest.raises(DimensionMismatchError):
        compress(2, 3, np.eye(4), np.eye(4))


def test_compress_symbol_identity(rng):
    m, n = 2, 3
    S, T = random_complex(rng, m + 1), random_complex(rng, n + 1)
    R = compress(m, n, S, T)
    g = sphere_grid(m + n + 2)
    lhs = symbol_values(m, S, g.theta, g.phi) - symbol_values(n, T, g.theta, g.phi)
    assert np.abs(lhs - symbol_values(m + n, R, g.theta, g.phi)).max() < 1e-10


def test_pushforward_examples():
    ch = berezin_channel(3, 2, sphere_grid(7))
    nu = pushforward_state(State.tracial(4), ch)
    assert np.allclose(nu.density, np.eye(3) / 3, atol=1e-12)
    mu = random_state(4, 2)
    nu = pushforward_state(mu, ch)
    assert abs(np.trace(nu.density) - 1) < 1e-12 and np.linalg.eigvalsh(nu.density).min() > -1e-12
    with pytest.raises(InvalidStateError):
        pushforward_state(random_state(3, 0), ch)


def test_pushforward_of_north_pole():
    ch = berezin_channel(2, 2, sphere_grid(6))
    nu = pushforward_state(State.pure(coherent_vectors(2, 0.0, 0.0)), ch)
    w, V = np.linalg.eigh(nu.density)
    top = V[:, -1]
    assert np.argmax(np.abs(top)) == 0 and abs(top[0]) > 0.99


def test_gambit_examples(rng):
    assert gambit_bound(2, 2, np.eye(3), np.eye(3), 0.6).value < 1e-10
    for m, n in ((1, 2), (3, 2), (2, 4)):
        S, T = random_hermitian(rng, m + 1), random_hermitian(rng, n + 1)
        out = gambit_bound(m, n, S, T, 0.7)
        assert out.holds and out.direct <= out.value + 1e-8


def test_gambit_symbol_term_bounded_by_gamma(rng):
    m, n, gamma = 2, 3, 1.3
    L = matrix_pair_seminorm(m, n, gamma)
    for _ in range(5):
        S, T = random_hermitian(rng, m + 1), random_hermitian(rng, n + 1)
        s = L(S, T)
        out = gambit_bound(m, n, S / s, T / s, 0.6)
        assert out.symbol_term <= gamma + 1e-8


def test_prox_bound_formula():
    c = {1: SPIN_HALF, 2: Constants(2, 0.61, 0.62, 0.72)}
    a, b = prox_upper_bound(1, 2, c), prox_upper_bound(2, 1, c)
    assert a.certified_bound == b.certified_bound
    d = prox_upper_bound(2, 2, c)
    assert d.certified_bound == pytest.approx(0.61 + 2 * 0.72)
    assert d.gamma_used == pytest.approx(2 * 0.72)
    assert np.isnan(d.empirical_hausdorff) and d.consistent
    with pytest.raises(MissingConstantsError):
        prox_upper_bound(1, 3, c)


def test_sample_states_seeded():
    a, b = sample_states(3, 6, 1), sample_states(3, 6, 1)
    assert all(np.array_equal(x.density, y.density) for x, y in zip(a, b))
    assert abs(np.linalg.eigvalsh(a[1].density)[-1] - 1) < 1e-12


def test_hausdorff_spin_half_below_chain():
    gamma = 2 * SPIN_HALF.gamma
    L = matrix_pair_seminorm(1, 1, gamma)
    h = hausdorff_estimate(1, 1, L, samples=4, seed=0)
    assert 0 < h.value <= SPIN_HALF.delta + gamma + 1e-6
    report = prox_upper_bound(1, 1, {1: SPIN_HALF}, empirical=h.value)
    assert report.consistent


def test_trace_state_is_close_to_its_image():
    L = matrix_pair_seminorm(2, 2, 1.45)
    ch = berezin_channel(2, 2, sphere_grid(6))
    tau = State.tracial(3)
    res = state_metric(L, tau, pushforward_state(tau, ch), "left", "right")
    far = state_metric(L, State.pure(coherent_vectors(2, 0.0, 0.0)), State.pure(coherent_vectors(2, np.pi, 0.0)),
                       "left", "right")
    assert res.value < 0.5 * far.value
