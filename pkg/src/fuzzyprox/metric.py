"""Lipschitz seminorms, states, and the state-space metric of a direct-sum seminorm.

Length convention: the bi-invariant metric on SU(2) whose orthonormal Lie
algebra basis is represented by ``i sigma_k / 2`` at ``n = 1``.  One-parameter
subgroups of unit speed then rotate the sphere at unit angular speed, so

* ``L^B_n(T) = sup_{|u|=1} ||[u.J, T]||`` and
* ``L_A(f) = sup_x |grad f(x)|`` for the round unit sphere.
"""

from __future__ import annotations

import copy
import logging
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize

from .errors import DimensionMismatchError, InvalidParameterError, InvalidStateError, UnsupportedDegreeError
from .group import Irrep
from .sphere import BandLimited, FunctionSamples, QuadratureGrid, fit_band_limited, maximize_on_sphere, sup_grid

log = logging.getLogger(__name__)

# -- Hermitian coordinates ------------------------------------------------


@lru_cache(maxsize=None)
def hermitian_basis(d: int) -> np.ndarray:
    """Hilbert-Schmidt orthonormal basis of d x d Hermitian matrices, shape ``(d*d, d, d)``.

    The first ``d`` elements are the diagonal matrix units.
    """
    out = []
    for a in range(d):
        E = np.zeros((d, d), dtype=complex)
        E[a, a] = 1
        out.append(E)
    r = 1 / np.sqrt(2)
    for a in range(d):
        for b in range(a + 1, d):
            E = np.zeros((d, d), dtype=complex)
            E[a, b] = E[b, a] = r
            out.append(E)
            E = np.zeros((d, d), dtype=complex)
            E[a, b], E[b, a] = -1j * r, 1j * r
            out.append(E)
    B = np.array(out)
    B.setflags(write=False)
    return B


def to_coords(X: np.ndarray) -> np.ndarray:
    B = hermitian_basis(X.shape[0])
    return (B.reshape(len(B), -1) @ X.T.ravel()).real


def from_coords(x: np.ndarray, d: int) -> np.ndarray:
    return np.tensordot(x, hermitian_basis(d), axes=1)


def gradient_coords(G: np.ndarray) -> np.ndarray:
    """Coordinates of the functional ``X -> Re tr(G X)`` restricted to Hermitian ``X``."""
    Gh = (G + G.conj().T) / 2
    return to_coords(Gh)


def is_hermitian(X: np.ndarray, tol: float = 1e-12) -> bool:
    return X.ndim == 2 and X.shape[0] == X.shape[1] and np.allclose(X, X.conj().T, atol=tol, rtol=0)


def opnorm(X: np.ndarray) -> float:
    """Operator norm (largest singular value)."""
    if is_hermitian(X, 1e-14):
        return float(np.abs(np.linalg.eigvalsh((X + X.conj().T) / 2)).max())
    return float(np.linalg.norm(X, 2))


# -- matrix Lipschitz seminorm ------------------------------------------------


def fibonacci_directions(count: int) -> np.ndarray:
    i = np.arange(count) + 0.5
    z = 1 - 2 * i / count
    ph = np.pi * (1 + 5**0.5) * i
    r = np.sqrt(1 - z * z)
    return np.stack([r * np.cos(ph), r * np.sin(ph), z], axis=1)


# u and -u give the same norm, so the upper hemisphere of a 2k-point lattice suffices
COARSE_DIRECTIONS = fibonacci_directions(256)[:128]
# looser inner settings for evaluations inside outer ascents; reported values use the defaults
SMOOTH_DIRECTIONS = fibonacci_directions(128)[:64]
ASCENT_SETTINGS = {"tol": 1e-10, "max_iter": 25}


@dataclass(frozen=True)
class LipschitzWitness:
    """Maximiser of ``|<psi| i[u.J, T] |psi>|``; ``sign`` is the sign of that expectation."""

    value: float
    direction: np.ndarray
    vector: np.ndarray
    sign: float

    def subgradient(self, rep: Irrep) -> np.ndarray:
        K = np.tensordot(self.direction, rep.generators, axes=1)
        X = self.sign * np.outer(self.vector, self.vector.conj())
        return 1j * (X @ K - K @ X)


def _commutator_stack(rep: Irrep, T: np.ndarray) -> np.ndarray:
    return np.stack([1j * (J @ T - T @ J) for J in rep.generators])


def _tangent_frames(U: np.ndarray) -> np.ndarray:
    """Orthonormal tangent pairs at each unit vector, shape ``(s, 3, 2)``."""
    x, y, z = U[:, 0], U[:, 1], U[:, 2]
    # cross with e_x, or with e_y when U is close to e_x
    use_x = np.abs(x) < 0.9
    t1 = np.where(use_x[:, None], np.stack([np.zeros_like(x), z, -y], 1), np.stack([-z, np.zeros_like(x), x], 1))
    t1 /= np.sqrt(np.einsum("sk,sk->s", t1, t1))[:, None]
    t2 = np.stack([y * t1[:, 2] - z * t1[:, 1], z * t1[:, 0] - x * t1[:, 2], x * t1[:, 1] - y * t1[:, 0]], 1)
    return np.stack([t1, t2], axis=2)


def lipschitz_witness(
    rep: Irrep,
    T: np.ndarray,
    directions: np.ndarray = COARSE_DIRECTIONS,
    starts: int = 6,
    max_iter: int = 100,
    tol: float = 1e-13,
    hint: np.ndarray | None = None,
) -> LipschitzWitness:
    """Evaluate ``L^B_n`` on Hermitian ``T`` with a maximising direction and vector.

    ``||u.H||`` for ``H_k = i[J_k, T]`` equals the top eigenvalue of ``u.H`` or
    of ``-u.H``, so after orienting each start we maximise ``lambda_max(u.H)``
    over unit ``u``.  Coarse scan of ``directions``, then Riemannian Newton
    steps using the second-order eigenvalue perturbation; a step that fails to
    increase the value is replaced by the monotone update
    ``u -> <psi|H|psi> / |.|``.  ``hint`` adds an extra starting direction.
    """
    if T.shape != (rep.dim, rep.dim):
        raise DimensionMismatchError(f"operator of shape {T.shape} for irrep of dimension {rep.dim}")
    H = _commutator_stack(rep, T)
    M = np.einsum("uk,kab->uab", directions, H)
    w = np.linalg.eigvalsh(M)
    coarse = np.maximum(w[:, -1], -w[:, 0])
    order = np.argsort(-coarse, kind="stable")[:starts]
    U = directions[order] * np.where(w[order, -1] >= -w[order, 0], 1.0, -1.0)[:, None]
    if hint is not None:
        U = np.vstack([hint, -hint, U])

    def top(U):
        w, V = np.linalg.eigh(np.einsum("sk,kab->sab", U, H))
        return w, V

    w, V = top(U)
    lam = w[:, -1]
    for _ in range(max_iter):
        psi = V[:, :, -1]
        A = np.einsum("sai,kab,sb->ski", V.conj(), H, psi)  # <phi_i|H_k|psi>
        g = A[:, :, -1].real
        gap = lam[:, None] - w[:, :-1]
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            Hs = 2 * np.einsum("ski,sli,si->skl", A[:, :, :-1], A[:, :, :-1].conj(),
                               np.where(gap > 1e-12, 1 / gap, 0.0)).real
        F = _tangent_frames(U)
        M2 = np.einsum("ska,skl,slb->sab", F, Hs, F) - lam[:, None, None] * np.eye(2)
        rhs = -np.einsum("ska,sk->sa", F, g)
        try:
            step = np.linalg.solve(M2, rhs[:, :, None])[:, :, 0]
        except np.linalg.LinAlgError:
            step = np.zeros_like(rhs)
        step = np.nan_to_num(step)
        Un = U + np.einsum("ska,sa->sk", F, step)
        Un /= np.linalg.norm(Un, axis=1, keepdims=True)
        wn, Vn = top(Un)
        bad = wn[:, -1] < lam
        if np.any(bad):
            Ua = g[bad] / np.maximum(np.linalg.norm(g[bad], axis=1, keepdims=True), 1e-300)
            Un[bad] = Ua
            wa, Va = top(Ua)
            wn[bad], Vn[bad] = wa, Va
        gain = wn[:, -1] - lam
        U, w, V, lam = Un, wn, Vn, wn[:, -1]
        if np.all(gain <= tol * np.maximum(np.abs(lam), 1e-300)):
            break
    k = int(np.argmax(lam))
    return LipschitzWitness(float(lam[k]), U[k], V[k, :, -1], 1.0)


def matrix_lipschitz(rep: Irrep, T: np.ndarray) -> float:
    """``L^B_n(T)`` for a square matrix of dimension ``d_n``.

    Non-Hermitian input is handled through ``max`` over its real and imaginary
    parts, which agrees with the Hermitian evaluation on self-adjoint elements.
    """
    T = np.asarray(T, dtype=complex)
    if T.shape != (rep.dim, rep.dim):
        raise DimensionMismatchError(f"operator of shape {T.shape} for irrep of dimension {rep.dim}")
    if is_hermitian(T):
        return lipschitz_witness(rep, (T + T.conj().T) / 2).value
    # ||[X, T]|| for non-normal T: scan directions with full singular values
    best = 0.0
    for u in fibonacci_directions(1024)[:512]:
        K = np.tensordot(u, rep.generators, axes=1)
        best = max(best, float(np.linalg.norm(K @ T - T @ K, 2)))
    return best


def difference_quotient(rep: Irrep, T: np.ndarray, axis, angle: float) -> float:
    """``||alpha_g(T) - T|| / l(g)`` for the rotation by ``angle`` about ``axis``."""
    from .group import rotation_unitary

    U = rotation_unitary(rep, axis, angle)
    return opnorm(U @ T @ U.conj().T - T) / abs(angle)


# -- function Lipschitz seminorm -------------------------------------------


def band_limited_lipschitz(f: BandLimited, grid: QuadratureGrid | None = None, polish: bool = True) -> float:
    grid = grid if grid is not None else sup_grid(2 * f.degree + 2)
    starts = 6 if polish else 0
    val, _ = maximize_on_sphere(f.gradient_norm, grid, starts=starts)
    return val


def function_lipschitz(f: FunctionSamples | BandLimited, degree: int | None = None) -> float:
    """Lipschitz constant of a band-limited function for the round geodesic metric.

    Sampled input is first expanded in spherical harmonics up to ``degree``
    (exact when the grid integrates degree ``2 * degree``), then the gradient
    norm is maximised on a refined grid with local polish.
    """
    if isinstance(f, BandLimited):
        return band_limited_lipschitz(f)
    if degree is None:
        degree = f.grid.exact_degree // 2
    if degree > f.grid.exact_degree:
        raise UnsupportedDegreeError(f"degree {degree} exceeds grid exactness {f.grid.exact_degree}")
    return band_limited_lipschitz(fit_band_limited(f, degree))


# -- ratio ascent ----------------------------------------------------------------


def _ratio_ascent(value_grad, x0: np.ndarray, maxiter: int = 300, restarts: int = 2) -> tuple[float, np.ndarray]:
    """Maximise a scale-invariant ratio by L-BFGS on its negative, with restarts.

    Restarting clears the curvature memory, which helps past nonsmooth kinks.
    """
    x = x0 / np.linalg.norm(x0)
    best = value_grad(x)[0]
    best_x = x
    for _ in range(restarts):
        res = minimize(lambda y: tuple(-np.asarray(v) for v in value_grad(y)), x, jac=True,
                       method="L-BFGS-B", options={"maxiter": maxiter, "gtol": 1e-10, "ftol": 1e-13})
        x = res.x / np.linalg.norm(res.x)
        if -res.fun > best + 1e-12:
            best, best_x = -float(res.fun), x
        else:
            break
    return float(best), best_x


@dataclass(frozen=True)
class AscentResult:
    value: float
    x: np.ndarray
    source: str
    by_source: dict


def multistart_ascent(value_grad, starts, polish: int = 3, short_iter: int = 40,
                      screen: int | None = None) -> AscentResult:
    """Short ascent from every ``(source, x0)`` start, then a long polish of the leading ``polish``.

    With ``screen`` set, starts are first ranked by their raw value and only
    the best ``screen`` get the short ascent.  Ties are broken by start order,
    so the result is deterministic.
    """
    starts = [(src, x0) for src, x0 in starts if np.linalg.norm(x0) > 0]
    by_source: dict[str, float] = {}
    if screen is not None and len(starts) > screen:
        raw = [value_grad(x0 / np.linalg.norm(x0))[0] for _, x0 in starts]
        for (src, _), v in zip(starts, raw):
            by_source[src] = max(by_source.get(src, 0.0), v)
        keep = np.argsort(-np.asarray(raw), kind="stable")[:screen]
        starts = [starts[i] for i in sorted(keep)]
    short = []
    for i, (source, x0) in enumerate(starts):
        val, x = _ratio_ascent(value_grad, x0, maxiter=short_iter, restarts=1)
        short.append((-val, i, source, x))
    if not short:
        raise InvalidParameterError("no nonzero starting point")
    short.sort(key=lambda r: (r[0], r[1]))
    for nv, _, source, _ in short:
        by_source[source] = max(by_source.get(source, 0.0), -nv)
    best = (-np.inf, None, "")
    for nv, _, source, x0 in short[:polish]:
        val, x = _ratio_ascent(value_grad, x0)
        if -nv > val:
            val, x = -nv, x0
        by_source[source] = max(by_source[source], val)
        if val > best[0] + 1e-12:
            best = (val, x, source)
    return AscentResult(float(best[0]), best[1], best[2], by_source)


def pnorm(values: np.ndarray, p: float | None) -> tuple[float, np.ndarray]:
    """``(sum a^p)^(1/p)`` of nonnegative values with its gradient; ``p=None`` is the max."""
    a = np.asarray(values, dtype=float).ravel()
    top = a.max(initial=0.0)
    if top <= 0:
        return 0.0, np.zeros_like(a)
    if p is None:
        g = np.zeros_like(a)
        g[int(np.argmax(a))] = 1.0
        return float(top), g
    scale = (((a / top) ** p).sum()) ** (1 / p)
    val = top * scale
    return float(val), (a / val) ** (p - 1)


def smooth_matrix_lipschitz(rep: Irrep, T: np.ndarray, p: float,
                            directions: np.ndarray = COARSE_DIRECTIONS) -> tuple[float, np.ndarray]:
    """p-norm of ``|lambda_i(u.H)|`` over sampled directions, a smooth surrogate of ``L^B_n``.

    Returns the value and the Hermitian-coordinate gradient.
    """
    K = np.tensordot(directions, rep.generators, axes=1)
    w, V = np.linalg.eigh(1j * (K @ T - T @ K))
    val, g = pnorm(np.abs(w), p)
    g = g.reshape(w.shape) * np.sign(w)
    X = (V * g[:, None, :]) @ V.conj().transpose(0, 2, 1)
    G = 1j * (X @ K - K @ X).sum(axis=0)
    return val, gradient_coords(G)


def smoothed_ratio_search(parts, starts, schedule=(16.0, 64.0, 256.0), polish: int = 3,
                          screen: int | None = 16, short_iter: int = 30) -> AscentResult:
    """Maximise ``num / den`` where ``parts(x, p)`` returns ``(num, g_num, den, g_den)``.

    ``p`` selects a p-norm smoothing of the inner maxima and ``p=None`` the
    exact value.  Starts are scored exactly, the best ``screen`` get a short
    smoothed ascent at the first ``p``, and the leading ``polish`` are carried
    through the remaining schedule and finished on the exact ratio.
    """

    def ratio(p):
        def fun(x):
            num, gn, den, gd = parts(x, p)
            if den <= 1e-300:
                return 0.0, np.zeros_like(x)
            return num / den, (gn * den - num * gd) / den**2
        return fun

    exact = ratio(None)
    starts = [(src, x0 / np.linalg.norm(x0)) for src, x0 in starts if np.linalg.norm(x0) > 0]
    if not starts:
        raise InvalidParameterError("no nonzero starting point")
    raw = [exact(x0)[0] for _, x0 in starts]
    by_source: dict[str, float] = {}
    for (src, _), v in zip(starts, raw):
        by_source[src] = max(by_source.get(src, 0.0), v)
    order = np.argsort(-np.asarray(raw), kind="stable")
    if screen is not None:
        order = order[:screen]
    short = []
    for i in sorted(order):
        src, x0 = starts[i]
        _, x = _ratio_ascent(ratio(schedule[0]), x0, maxiter=short_iter, restarts=1)
        v = exact(x)[0]
        if raw[i] > v:
            v, x = raw[i], x0
        short.append((-v, i, src, x))
    short.sort(key=lambda r: (r[0], r[1]))
    best = (-np.inf, None, "")
    for nv, _, src, x0 in short[:polish]:
        x = x0
        for p in schedule[1:]:
            _, x = _ratio_ascent(ratio(p), x, maxiter=200, restarts=1)
        val, x = _ratio_ascent(exact, x, maxiter=200, restarts=2)
        if -nv > val:
            val, x = -nv, x0
        by_source[src] = max(by_source[src], val)
        if val > best[0] + 1e-12:
            best = (val, x, src)
    return AscentResult(float(best[0]), best[1], best[2], by_source)


# -- states ------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class State:
    """A state of a matrix algebra given by its density matrix."""

    density: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.density)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise InvalidStateError("density must be a square matrix")
        if not np.allclose(rho, rho.conj().T, atol=1e-12):
            raise InvalidStateError("density is not Hermitian")
        if abs(np.trace(rho).real - 1) > 1e-10:
            raise InvalidStateError(f"trace {np.trace(rho).real} != 1")
        if np.linalg.eigvalsh(rho).min() < -1e-10:
            raise InvalidStateError("density is not positive")

    @property
    def dim(self) -> int:
        return self.density.shape[0]

    def __call__(self, T: np.ndarray) -> complex:
        return complex(np.trace(self.density @ T))

    @classmethod
    def tracial(cls, dim: int) -> "State":
        return cls(np.eye(dim, dtype=complex) / dim)

    @classmethod
    def pure(cls, v: np.ndarray) -> "State":
        v = np.asarray(v, dtype=complex)
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()))


@dataclass(frozen=True, eq=False)
class MeasureState:
    """A state of ``C(G/H)`` given by a probability vector on grid nodes."""

    grid: QuadratureGrid
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (len(self.grid),):
            raise InvalidStateError("one weight per grid node is required")
        if w.min() < -1e-12 or abs(w.sum() - 1) > 1e-12:
            raise InvalidStateError("weights must form a probability vector")

    def __call__(self, f: BandLimited | FunctionSamples) -> float:
        vals = f.values if isinstance(f, FunctionSamples) else f(self.grid.theta, self.grid.phi)
        return float(np.dot(self.weights, np.real(vals)))


def random_state(dim: int, seed: int) -> State:
    """Seeded random density matrix ``G G^* / tr(G G^*)`` with ``G`` complex Gaussian."""
    if dim < 1:
        raise InvalidParameterError("dimension must be positive")
    rng = np.random.default_rng(seed)
    G = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = G @ G.conj().T
    rho = (rho + rho.conj().T) / 2
    return State(rho / np.trace(rho).real)


# -- direct-sum seminorms -----------------------------------------------------


class Summand:
    """One side of a direct sum: a real coordinate space with a Lipschitz seminorm.

    Subclasses supply ``element``, ``lipschitz`` (value and coordinate subgradient
    on the current working set), ``exact_lipschitz`` and ``state_coefficients``.
    """

    dim: int
    unit: np.ndarray

    def element(self, x):
        raise NotImplementedError

    def lipschitz(self, x) -> tuple[float, np.ndarray]:
        raise NotImplementedError

    def exact_lipschitz(self, x) -> float:
        return self.lipschitz(x)[0]

    def smooth_lipschitz(self, x, p: float | None) -> tuple[float, np.ndarray]:
        """p-norm smoothed value and gradient; ``p=None`` falls back to ``lipschitz``."""
        return self.lipschitz(x)

    def state_coefficients(self, state) -> np.ndarray:
        raise NotImplementedError


class MatrixSummand(Summand):
    """``(B^n, L^B_n)`` on Hermitian coordinates."""

    def __init__(self, rep: Irrep):
        self.rep = rep
        self.dim = rep.dim**2
        self.unit = to_coords(np.eye(rep.dim, dtype=complex))

    def element(self, x):
        return from_coords(x, self.rep.dim)

    def lipschitz(self, x):
        w = lipschitz_witness(self.rep, self.element(x), starts=3, **ASCENT_SETTINGS)
        return w.value, gradient_coords(w.subgradient(self.rep))

    def exact_lipschitz(self, x):
        return lipschitz_witness(self.rep, self.element(x), directions=fibonacci_directions(1024)[:512],
                                 starts=12).value

    def smooth_lipschitz(self, x, p):
        if p is None:
            return self.lipschitz(x)
        return smooth_matrix_lipschitz(self.rep, self.element(x), p, SMOOTH_DIRECTIONS)

    def state_coefficients(self, state: State) -> np.ndarray:
        if state.dim != self.rep.dim:
            raise InvalidStateError(f"state of dimension {state.dim} on B^{self.rep.n}")
        return gradient_coords(state.density)


class FunctionSummand(Summand):
    """``(A, L_A)`` restricted to real harmonics of degree ``<= degree``."""

    def __init__(self, degree: int, grid: QuadratureGrid | None = None):
        from .sphere import _real_harmonics_on_grid, harmonic_matrix, real_to_complex, _angular_momentum_blocks

        self.degree = degree
        self.dim = (degree + 1) ** 2
        self.unit = np.zeros(self.dim)
        self.unit[0] = 1.0
        self.grid = grid if grid is not None else sup_grid(2 * degree + 2)
        self._values = _real_harmonics_on_grid(degree, self.grid)
        Y = harmonic_matrix(degree, self.grid.theta, self.grid.phi)
        C = np.sqrt(4 * np.pi) * real_to_complex(degree)
        Lops = _angular_momentum_blocks(degree)
        # rotation field r x grad f = Re(i Y L c); shape (nodes, 3, params)
        self._fields = np.stack([(1j * Y @ Lops[k] @ C).real for k in range(3)], axis=1)

    def element(self, x):
        return BandLimited(self.degree, x)

    def lipschitz(self, x):
        F = self._fields @ x
        norms = np.linalg.norm(F, axis=1)
        k = int(np.argmax(norms))
        if norms[k] == 0:
            return 0.0, np.zeros(self.dim)
        return float(norms[k]), (F[k] / norms[k]) @ self._fields[k]

    def exact_lipschitz(self, x):
        return band_limited_lipschitz(self.element(x), self.grid)

    def smooth_lipschitz(self, x, p):
        if p is None:
            return self.lipschitz(x)
        F = self._fields @ x
        norms = np.linalg.norm(F, axis=1)
        val, g = pnorm(norms, p)
        c = np.where(norms > 0, g / np.maximum(norms, 1e-300), 0.0)
        return val, np.tensordot(c[:, None] * F, self._fields, axes=([0, 1], [0, 1]))

    def state_coefficients(self, state: MeasureState) -> np.ndarray:
        from .sphere import _real_harmonics_on_grid

        return state.weights @ _real_harmonics_on_grid(self.degree, state.grid)


@dataclass
class DirectSumSeminorm:
    """``L(a, b) = L_left(a) v L_right(b) v gamma^{-1} (N(a, b) v N(a*, b*))``.

    ``bridge(xa, xb)`` returns the bridge value with coordinate subgradients on
    its working node set, ``bridge.exact(xa, xb)`` the sup over the sphere and
    the point attaining it, and ``bridge.add_node(x)`` enlarges the working set.
    On Hermitian pairs ``N(a*, b*) = N(a, b)``, so one evaluation covers both.
    An infinite ``gamma`` (or no bridge) decouples the summands.
    """

    gamma: float
    left: Summand
    right: Summand
    bridge: object | None = None
    label: str = ""

    @property
    def coupled(self) -> bool:
        return self.bridge is not None and np.isfinite(self.gamma)

    def terms(self, xa, xb, exact: bool = True) -> dict[str, float]:
        ll = self.left.exact_lipschitz(xa) if exact else self.left.lipschitz(xa)[0]
        lr = self.right.exact_lipschitz(xb) if exact else self.right.lipschitz(xb)[0]
        if not self.coupled:
            nb = 0.0
        else:
            nb = (self.bridge.exact(xa, xb)[0] if exact else self.bridge(xa, xb)[0]) / self.gamma
        return {"left": ll, "right": lr, "bridge": nb}

    def __call__(self, a, b) -> float:
        return max(self.terms(_coords_of(a), _coords_of(b)).values())

    def value_and_subgradient(self, xa, xb, p: float | None = None):
        """Value and subgradient on the working sets; finite ``p`` smooths every max by a p-norm."""
        la, ga = self.left.smooth_lipschitz(xa, p)
        lb, gb = self.right.smooth_lipschitz(xb, p)
        vals = [la, lb]
        grads = [(ga, np.zeros_like(xb)), (np.zeros_like(xa), gb)]
        if self.coupled:
            nv, na, nb = self.bridge.smooth(xa, xb, p) if p is not None else self.bridge(xa, xb)
            vals.append(nv / self.gamma)
            grads.append((na / self.gamma, nb / self.gamma))
        val, w = pnorm(np.array(vals), p)
        return val, sum(wi * g[0] for wi, g in zip(w, grads)), sum(wi * g[1] for wi, g in zip(w, grads))


def _coords_of(a):
    if isinstance(a, BandLimited):
        return a.params
    a = np.asarray(a)
    if a.ndim == 1 and not np.iscomplexobj(a):
        return a.astype(float)
    return to_coords(a.astype(complex))


# -- state metric ---------------------------------------------------------------


@dataclass
class StateMetricResult:
    """Lower estimate of ``rho_L(mu, nu)`` with the feasible pair that attains it.

    ``upper`` is the value of the relaxed problem on the working node set
    before rescaling; ``unbounded`` flags that the radius cap was active.
    """

    value: float
    pair: tuple
    converged: bool
    unbounded: bool = False
    upper: float = float("nan")
    rounds: int = 0
    history: list = field(default_factory=list)


def state_metric(
    L: DirectSumSeminorm,
    mu,
    nu,
    mu_side: str = "left",
    nu_side: str = "right",
    radius: float | None = None,
    tol: float = 1e-4,
    max_rounds: int = 6,
    start: tuple | None = None,
    maxiter: int = 60,
    schedule: tuple = (16.0, 128.0),
) -> StateMetricResult:
    """Estimate ``sup{|mu(a, b) - nu(a, b)| : L(a, b) <= 1}`` over Hermitian pairs.

    Maximising a linear functional ``c`` over the unit ball of a seminorm is
    the same as minimising the seminorm on the hyperplane ``c = 1``, a convex
    problem.  Every inner max (directions, nodes, the three terms) is
    replaced by a p-norm along ``schedule`` and solved by quasi-Newton steps,
    with the bridge evaluated on a working node set.  Each round re-evaluates every term
    exactly, rescales the optimiser so the returned pair is feasible for the
    full seminorm, and adds the node where the bridge is most violated.
    Rounds stop once the certified value improves by less than ``tol`` or no
    node is violated.  Iterates are confined to the Euclidean coordinate ball
    of ``radius`` (a term ``|x| / radius`` joins the max), which keeps the
    problem bounded when the bridge is absent.
    """
    if L.coupled:
        # private working node set; add_node rebinds arrays, so a shallow copy suffices
        L = replace(L, bridge=copy.copy(L.bridge))
    na, nb = L.left.dim, L.right.dim
    c = np.zeros(na + nb)
    for state, side, sgn in ((mu, mu_side, 1.0), (nu, nu_side, -1.0)):
        if side == "left":
            c[:na] += sgn * L.left.state_coefficients(state)
        elif side == "right":
            c[na:] += sgn * L.right.state_coefficients(state)
        else:
            raise InvalidParameterError(f"side must be 'left' or 'right', got {side!r}")
    unit = np.concatenate([L.left.unit, L.right.unit])
    # the pair (1, 1) lies in the kernel of L; quotient it out
    c = c - unit * (c @ unit) / (unit @ unit)
    if np.linalg.norm(c) < 1e-14:
        zero = (L.left.element(np.zeros(na)), L.right.element(np.zeros(nb)))
        return StateMetricResult(0.0, zero, True, upper=0.0)
    if radius is None:
        radius = 10 * np.pi * (1 + (L.gamma if np.isfinite(L.gamma) else 0.0))

    # parametrise {x : c.x = 1, unit.x = 0}
    A = np.vstack([c, unit])
    _, _, Vt = np.linalg.svd(A)
    Z = Vt[2:].T
    x0 = np.linalg.lstsq(A, np.array([1.0, 0.0]), rcond=None)[0]

    def capped(x, val, g):
        r = np.linalg.norm(x) / radius
        if r > val:
            return r, x / (np.linalg.norm(x) * radius)
        return val, g

    def seminorm(w, p=None):
        x = x0 + Z @ w
        val, ga, gb = L.value_and_subgradient(x[:na], x[na:], p)
        val, g = capped(x, val, np.concatenate([ga, gb]))
        return val, Z.T @ g

    if start is not None:
        xs = np.concatenate([_coords_of(start[0]), _coords_of(start[1])])
        xs = xs - unit * (xs @ unit) / (unit @ unit)
        s = c @ xs
        w = Z.T @ (xs / s - x0) if abs(s) > 1e-12 else np.zeros(Z.shape[1])
    else:
        w = np.zeros(Z.shape[1])
    best_val, best_x, best_cap = -np.inf, None, False
    history: list[float] = []
    converged = False
    relaxed = np.inf
    rounds = 0
    opts = {"maxiter": maxiter, "gtol": 1e-12, "ftol": 1e-14}
    for rounds in range(1, max_rounds + 1):
        for p in schedule if rounds == 1 else schedule[-1:]:
            res = minimize(seminorm, w, args=(p,), jac=True, method="L-BFGS-B", options=opts)
            w = res.x
        relaxed = 1.0 / res.fun if res.fun > 0 else np.inf
        x = x0 + Z @ w
        terms = L.terms(x[:na], x[na:], exact=True)
        lx = max(terms.values())
        cap = np.linalg.norm(x) / radius
        val = 1.0 / max(lx, cap)
        history.append(float(val))
        improved = val - best_val
        if val > best_val:
            best_val, best_x, best_cap = val, x / max(lx, cap), cap >= lx * (1 - 1e-6)
        added = False
        if L.coupled:
            exact_n, where = L.bridge.exact(x[:na], x[na:])
            if exact_n > L.bridge(x[:na], x[na:])[0] * (1 + 1e-9) + 1e-12:
                L.bridge.add_node(where)
                added = True
        if not added or improved < tol:
            converged = True
            break
    x = best_x
    pair = (L.left.element(x[:na]), L.right.element(x[na:]))
    return StateMetricResult(float(best_val), pair, converged and not best_cap, bool(best_cap),
                             float(relaxed), rounds, history)
