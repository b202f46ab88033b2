"""Compression to the top component, Berezin pushforward of states, and the prox upper bound."""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Mapping

import numpy as np

from .berezin import BerezinChannel, berezin_channel, symbol_sup
from .errors import DimensionMismatchError, InvalidStateError, MissingConstantsError
from .group import highest_weight_embedding, make_irrep
from .metric import DirectSumSeminorm, State, matrix_lipschitz, opnorm, state_metric
from .sphere import sphere_grid

log = logging.getLogger(__name__)


def compress(m: int, n: int, S: np.ndarray, T: np.ndarray) -> np.ndarray:
    """``V* (S (x) I_n - I_m (x) T) V`` as an operator on ``H^{m+n}``.

    Columns of ``V`` reshaped to ``d_m x d_n`` matrices ``C`` give
    ``(S (x) I) vec C = vec(S C)`` and ``(I (x) T) vec C = vec(C T^t)``.
    """
    S = np.asarray(S, dtype=complex)
    T = np.asarray(T, dtype=complex)
    if S.shape != (m + 1, m + 1) or T.shape != (n + 1, n + 1):
        raise DimensionMismatchError(f"S {S.shape} and T {T.shape} do not match ({m}, {n})")
    V = highest_weight_embedding(m, n)
    C = V.T.reshape(m + n + 1, m + 1, n + 1)
    img = np.einsum("ab,kbc->kac", S, C) - np.einsum("kab,cb->kac", C, T)
    return V.conj().T @ img.reshape(m + n + 1, -1).T


def pushforward_state(mu: State, channel: BerezinChannel) -> State:
    """``nu(T) = mu(sigma-check^m(sigma^n_T))``, a state of ``B^n`` from a state of ``B^m``."""
    if not isinstance(mu, State):
        raise InvalidStateError("a density-matrix state is required")
    if mu.dim != channel.m + 1:
        raise InvalidStateError(f"state of dimension {mu.dim} for a channel from B^{channel.m}")
    rho = channel.adjoint_apply(mu.density)
    rho = rho / np.trace(rho).real
    return State(rho)


@dataclass(frozen=True)
class GambitBound:
    """``delta_m L^B_m(S) + ||sigma^m_S - sigma^n_T||_inf`` and the direct left side it bounds."""

    value: float
    lipschitz_term: float
    symbol_term: float
    direct: float

    @property
    def holds(self) -> bool:
        return self.direct <= self.value + 1e-8

    def __float__(self) -> float:
        return self.value


def gambit_bound(m: int, n: int, S: np.ndarray, T: np.ndarray, delta_m: float) -> GambitBound:
    """Bound ``||S - sigma-check^m(sigma^n_T)||`` through the Berezin transform of ``S``.

    The symbol difference is evaluated as the upper symbol of the compression
    at level ``m + n``.  The direct left side is computed as well; a violation
    is logged and visible through ``holds``.
    """
    S = np.asarray(S, dtype=complex)
    T = np.asarray(T, dtype=complex)
    R = compress(m, n, S, T)
    lip = delta_m * matrix_lipschitz(make_irrep(m), S)
    sym = symbol_sup(m + n, R)
    grid = sphere_grid(m + n + 2)
    direct = opnorm(S - berezin_channel(m, n, grid).apply(T))
    out = GambitBound(lip + sym, lip, sym, direct)
    if not out.holds:
        log.warning("gambit inequality violated: %.3g > %.3g", direct, out.value)
    return out


# -- reports --------------------------------------------------------------------


@dataclass(frozen=True)
class Constants:
    """Per-``n`` empirical constants."""

    n: int
    delta: float
    gamma_A: float
    gamma_B: float

    @property
    def gamma(self) -> float:
        return max(self.gamma_A, self.gamma_B)


@dataclass(frozen=True)
class ProxReport:
    m: int
    n: int
    d_m: int
    d_n: int
    delta_m: float
    delta_n: float
    gammaA_m: float
    gammaB_m: float
    gammaA_n: float
    gammaB_n: float
    gamma_used: float
    certified_bound: float
    empirical_hausdorff: float
    seed: int
    exact_degree: int
    samples: int = 0
    details: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return asdict(self)

    @property
    def consistent(self) -> bool:
        return math.isnan(self.empirical_hausdorff) or self.empirical_hausdorff <= self.certified_bound + 1e-6


def prox_upper_bound(m: int, n: int, constants: Mapping[int, Constants], seed: int = 0,
                     empirical: float = float("nan"), exact_degree: int | None = None) -> ProxReport:
    """``max{delta_m, delta_n} + max{gammaA_m, gammaB_m} + max{gammaA_n, gammaB_n}``."""
    missing = [k for k in (m, n) if k not in constants]
    if missing:
        raise MissingConstantsError(f"no constants for n = {missing}")
    cm, cn = constants[m], constants[n]
    bound = max(cm.delta, cn.delta) + cm.gamma + cn.gamma
    return ProxReport(m, n, m + 1, n + 1, cm.delta, cn.delta, cm.gamma_A, cm.gamma_B, cn.gamma_A, cn.gamma_B,
                      cm.gamma + cn.gamma, bound, empirical, seed,
                      m + n + 2 if exact_degree is None else exact_degree)


# -- empirical Hausdorff estimate ---------------------------------------------------


def sample_states(dim: int, samples: int, seed: int) -> list[State]:
    """Seeded states: alternating mixed Gaussian-ensemble densities and pure states."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(samples):
        G = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        if i % 2:
            out.append(State.pure(G[:, 0]))
        else:
            rho = G @ G.conj().T
            rho = (rho + rho.conj().T) / 2
            out.append(State(rho / np.trace(rho).real))
    return out


@dataclass(frozen=True)
class HausdorffEstimate:
    """Largest paired distance; ``from_left`` and ``from_right`` split it by the side the sample came from."""

    value: float
    per_sample: tuple
    unconverged: int
    from_left: float = float("nan")
    from_right: float = float("nan")

    def __float__(self) -> float:
        return self.value


def hausdorff_estimate(m: int, n: int, seminorm: DirectSumSeminorm, samples: int = 32, seed: int = 0,
                       refine: int = 4, max_rounds: int = 6) -> HausdorffEstimate:
    """Largest ``rho_L(mu, pushforward(mu))`` over seeded states from both sides.

    Every pair gets one cutting-plane round; the ``refine`` largest are then
    continued for up to ``max_rounds`` rounds from their certificates.  Each
    value is a certified lower estimate of the distance between the paired
    states; the pairing is the Berezin pushforward.
    """
    grid = sphere_grid(m + n + 2)
    forward = berezin_channel(m, n, grid)
    backward = berezin_channel(n, m, grid)
    pairs = [(mu, pushforward_state(mu, forward)) for mu in sample_states(m + 1, samples, seed)]
    pairs += [(pushforward_state(nu, backward), nu) for nu in sample_states(n + 1, samples, seed + 1)]
    first = [state_metric(seminorm, mu, nu, "left", "right", max_rounds=1) for mu, nu in pairs]
    vals = [r.value for r in first]
    unconverged = 0
    for i in sorted(np.argsort(-np.asarray(vals), kind="stable")[:refine]):
        mu, nu = pairs[i]
        r = state_metric(seminorm, mu, nu, "left", "right", max_rounds=max_rounds, start=first[i].pair)
        vals[i] = max(vals[i], r.value)
        unconverged += not r.converged
    half = len(pairs) // 2
    return HausdorffEstimate(float(max(vals)), tuple(vals), unconverged, float(max(vals[:half])),
                             float(max(vals[half:])))
