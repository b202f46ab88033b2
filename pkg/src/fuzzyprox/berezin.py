"""Berezin symbols, the Berezin transform and the defect constant delta^B_n."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DimensionMismatchError, UnsupportedDegreeError
from .group import Irrep, coherent_projections, coherent_vectors, make_irrep
from .metric import (
    ASCENT_SETTINGS,
    fibonacci_directions,
    from_coords,
    gradient_coords,
    hermitian_basis,
    is_hermitian,
    lipschitz_witness,
    pnorm,
    smooth_matrix_lipschitz,
    smoothed_ratio_search,
    to_coords,
)
from .sphere import BandLimited, FunctionSamples, QuadratureGrid, maximize_on_sphere, sphere_grid, sup_grid


def _check_dim(rep: Irrep, T: np.ndarray):
    if np.shape(T) != (rep.dim, rep.dim):
        raise DimensionMismatchError(f"operator of shape {np.shape(T)} for irrep of dimension {rep.dim}")


def symbol_values(n: int, T: np.ndarray, theta, phi) -> np.ndarray:
    """``tr(alpha_x(P^n) T) = <v_x|T|v_x>`` at arbitrary points."""
    V = coherent_vectors(n, theta, phi)
    vals = np.einsum("...a,ab,...b->...", V.conj(), T, V)
    return vals.real if is_hermitian(T) else vals


def upper_symbol(rep: Irrep, T: np.ndarray, grid: QuadratureGrid) -> FunctionSamples:
    """Covariant symbol ``sigma^n_T`` sampled on the grid."""
    T = np.asarray(T, dtype=complex)
    _check_dim(rep, T)
    return FunctionSamples(grid, symbol_values(rep.n, T, grid.theta, grid.phi))


def lower_operator(rep: Irrep, f, grid: QuadratureGrid, degree: int | None = None) -> np.ndarray:
    """Contravariant operator ``d_n * sum_k w_k f(x_k) alpha_{x_k}(P^n)``.

    ``f`` is either samples on ``grid`` (pass its band limit as ``degree``) or
    a :class:`BandLimited` function.  Matrix entries of ``alpha_x(P^n)`` have
    harmonic degree ``<= n``, so exactness requires ``degree + n``.
    """
    if isinstance(f, BandLimited):
        degree = f.degree if degree is None else degree
        values = f(grid.theta, grid.phi)
    else:
        if f.grid is not grid:
            raise DimensionMismatchError("samples live on a different grid")
        values = f.values
        degree = 0 if degree is None else degree
    if degree + rep.n > grid.exact_degree:
        raise UnsupportedDegreeError(
            f"integrand degree {degree + rep.n} exceeds grid exactness {grid.exact_degree}"
        )
    P = _projections(rep.n, grid)
    out = rep.dim * np.einsum("k,kab->ab", grid.weights * values, P)
    if np.isrealobj(values) or np.allclose(np.imag(values), 0):
        out = (out + out.conj().T) / 2
    return out


@lru_cache(maxsize=64)
def _projections(n: int, grid: QuadratureGrid) -> np.ndarray:
    P = coherent_projections(n, grid.theta, grid.phi)
    P.setflags(write=False)
    return P


def berezin_transform(rep: Irrep, T: np.ndarray, grid: QuadratureGrid) -> np.ndarray:
    """``sigma-check^n(sigma^n_T)``, the Berezin transform of ``T``."""
    T = np.asarray(T, dtype=complex)
    _check_dim(rep, T)
    if 2 * rep.n > grid.exact_degree:
        raise UnsupportedDegreeError(f"Berezin transform needs exactness {2 * rep.n}")
    return berezin_channel(rep.n, rep.n, grid).apply(T)


@dataclass(frozen=True, eq=False)
class BerezinChannel:
    """The unital completely positive map ``T -> sigma-check^m(sigma^n_T)`` from ``B^n`` to ``B^m``.

    ``matrix`` acts on row-major vectorisations.
    """

    m: int
    n: int
    matrix: np.ndarray
    grid: QuadratureGrid

    def apply(self, T: np.ndarray) -> np.ndarray:
        d_m, d_n = self.m + 1, self.n + 1
        return (self.matrix @ np.asarray(T, dtype=complex).reshape(d_n * d_n)).reshape(d_m, d_m)

    def adjoint_apply(self, rho: np.ndarray) -> np.ndarray:
        """Hilbert-Schmidt adjoint; maps densities on ``B^m`` to densities on ``B^n``."""
        d_m, d_n = self.m + 1, self.n + 1
        out = (self.matrix.conj().T @ np.asarray(rho, dtype=complex).reshape(d_m * d_m)).reshape(d_n, d_n)
        return (out + out.conj().T) / 2

    @property
    def hermitian_matrix(self) -> np.ndarray:
        """The channel in Hermitian coordinates (real, ``d_m^2 x d_n^2``)."""
        return _hermitian_form(self)


@lru_cache(maxsize=64)
def _hermitian_form(ch: BerezinChannel) -> np.ndarray:
    Bn = hermitian_basis(ch.n + 1)
    Bm = hermitian_basis(ch.m + 1)
    images = np.array([ch.apply(E) for E in Bn])
    return np.einsum("iab,jba->ij", Bm, images).real


@lru_cache(maxsize=64)
def berezin_channel(m: int, n: int, grid: QuadratureGrid) -> BerezinChannel:
    if m + n > grid.exact_degree:
        raise UnsupportedDegreeError(f"channel ({m},{n}) needs exactness {m + n}")
    Pm = _projections(m, grid)
    Pn = _projections(n, grid)
    d_m = m + 1
    # tr(P T) = sum_ab P_ba T_ab, so the row functional is vec(P^T)
    mat = d_m * np.einsum("k,ki,kj->ij", grid.weights, Pm.reshape(len(grid), -1),
                          np.transpose(Pn, (0, 2, 1)).reshape(len(grid), -1))
    mat.setflags(write=False)
    return BerezinChannel(m, n, mat, grid)


def symbol_sup_norm(f: FunctionSamples, evaluate=None, starts: int = 6) -> float:
    """Max of ``|f|`` over the nodes, optionally polished with a pointwise evaluator."""
    vals = np.abs(np.asarray(f.values))
    if evaluate is None or vals.size == 0:
        return float(vals.max(initial=0.0))
    best, _ = maximize_on_sphere(lambda t, p: np.abs(evaluate(t, p)), f.grid, starts=starts)
    return max(best, float(vals.max()))


def symbol_sup(n: int, T: np.ndarray, degree: int | None = None) -> float:
    """``||sigma^n_T||_inf`` by refined-grid scan plus polish."""
    grid = sup_grid(n + 2 if degree is None else degree)
    return symbol_sup_norm(FunctionSamples(grid, symbol_values(n, T, grid.theta, grid.phi)),
                           evaluate=lambda t, p: symbol_values(n, T, t, p))


# -- delta^B_n ----------------------------------------------------------------


@dataclass(frozen=True)
class DeltaEstimate:
    """Best ratio ``||T - B(T)|| / L(T)`` found, the witness and the start class that produced it."""

    n: int
    value: float
    witness: np.ndarray
    source: str
    by_source: dict

    def __float__(self) -> float:
        return self.value


def isotypic_directions(n: int, grid: QuadratureGrid | None = None) -> list[np.ndarray]:
    """Zonal Hermitian representatives of the spin-l components of ``B^n``, ``l = 1..n``.

    The Berezin transform is equivariant, so lower operators of zonal harmonics
    are spin-l tensor operators.
    """
    grid = grid if grid is not None else sphere_grid(2 * n + 2)
    rep = make_irrep(n)
    out = []
    for l in range(1, n + 1):
        p = np.zeros((n + 1) ** 2)
        p[l * l] = 1.0
        T = lower_operator(rep, BandLimited(n, p), grid)
        out.append(T / np.linalg.norm(T))
    return out


def matrix_lipschitz_parts(rep: Irrep):
    """``(value, gradient)`` of ``L^B_n`` on coordinates: smoothed for finite ``p``, exact for ``None``.

    The exact branch warm-starts from the previous maximising direction.
    """
    hint = [None]

    def den(T, p):
        if p is not None:
            return smooth_matrix_lipschitz(rep, T, p)
        lw = lipschitz_witness(rep, T, starts=2, hint=hint[0], **ASCENT_SETTINGS)
        hint[0] = lw.direction
        return lw.value, gradient_coords(lw.subgradient(rep))

    return den


def delta_parts(n: int, grid: QuadratureGrid | None = None):
    """``x -> (||(I - B)T||, grad, L^B_n(T), grad)`` in Hermitian coordinates, with p-norm smoothing."""
    rep = make_irrep(n)
    grid = grid if grid is not None else sphere_grid(2 * n + 2)
    Bc = berezin_channel(n, n, grid).hermitian_matrix
    resid = np.eye(Bc.shape[0]) - Bc
    den = matrix_lipschitz_parts(rep)

    def parts(x, p):
        T = from_coords(x, rep.dim)
        w, U = np.linalg.eigh(from_coords(resid @ x, rep.dim))
        num, g = pnorm(np.abs(w), p)
        G = (U * (g * np.sign(w))) @ U.conj().T
        d, gd = den(T, p)
        return num, resid.T @ gradient_coords(G), d, gd

    return parts


def delta_estimate(n: int, trials: int = 8, seed: int = 0, grid: QuadratureGrid | None = None,
                   detail: bool = False, polish: int = 3):
    """Empirical ``delta^B_n = sup ||T - B(T)|| / L^B_n(T)`` over Hermitian ``T``.

    Ascent starts from the zonal spin-l directions and from ``trials`` seeded
    random traceless Hermitian matrices.  Deterministic given ``seed``.
    """
    rep = make_irrep(n)
    grid = grid if grid is not None else sphere_grid(2 * n + 2)
    parts = delta_parts(n, grid)
    rng = np.random.default_rng(seed)
    starts = [("isotypic", to_coords(T)) for T in isotypic_directions(n, grid)]
    for _ in range(trials):
        X = rng.standard_normal((rep.dim, rep.dim)) + 1j * rng.standard_normal((rep.dim, rep.dim))
        X = X + X.conj().T
        X -= np.trace(X) / rep.dim * np.eye(rep.dim)
        starts.append(("random", to_coords(X)))
    best = smoothed_ratio_search(parts, starts, polish=polish, screen=None)
    T = from_coords(best.x, rep.dim)
    # final value with a finer direction scan, so the reported ratio is not inflated
    L = lipschitz_witness(rep, T, directions=fibonacci_directions(1024)[:512], starts=12).value
    R = T - berezin_transform(rep, T, grid)
    value = float(np.abs(np.linalg.eigvalsh(R)).max() / L)
    est = DeltaEstimate(n, value, T / L, best.source, best.by_source)
    return est if detail else est.value
