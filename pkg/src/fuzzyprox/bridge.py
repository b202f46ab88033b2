"""Bridge seminorms built from coherent projections, bridge constants and verification.

Both bridges evaluate ``sup_x ||A alpha_x(P) - alpha_x(P) B||`` where ``alpha_x(P)``
is rank one.  For ``v`` a unit vector,

    A v v* - v v* B = a v* - v b*,   a = A v,  b = B* v,

so the operator norm lives on a space of dimension at most two.  For the
matrix bridge ``v = v^m_x (x) v^n_x``, which splits ``a`` and ``b`` into
orthogonal pieces and leaves the singular values of
``[[s, -z], [y, 0]]``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize

from .berezin import lower_operator, matrix_lipschitz_parts, symbol_values
from .errors import DegenerateAmalgamError, DimensionMismatchError, InvalidParameterError
from .group import CosetPoint, coherent_vectors, make_irrep
from .metric import (
    DirectSumSeminorm,
    FunctionSummand,
    MatrixSummand,
    Summand,
    from_coords,
    gradient_coords,
    pnorm,
    smoothed_ratio_search,
    to_coords,
)
from .sphere import (
    BandLimited,
    FunctionSamples,
    QuadratureGrid,
    fit_band_limited,
    maximize_on_sphere,
    real_harmonics,
    sphere_grid,
    sup_grid,
)

log = logging.getLogger(__name__)

# -- rank-one kernel ------------------------------------------------------------


def rank_one_defect(Aop: np.ndarray, Bop: np.ndarray, v: np.ndarray) -> float:
    """Exact ``||A v v* - v v* B||`` from the two-dimensional range of the difference."""
    Aop = np.asarray(Aop, dtype=complex)
    Bop = np.asarray(Bop, dtype=complex)
    v = np.asarray(v, dtype=complex)
    d = v.shape[0]
    if v.ndim != 1 or Aop.shape != (d, d) or Bop.shape != (d, d):
        raise DimensionMismatchError(f"operators {Aop.shape}, {Bop.shape} and vector {v.shape}")
    nv = np.linalg.norm(v)
    if abs(nv - 1) > 1e-10:
        raise InvalidParameterError(f"vector norm {nv} is not 1")
    a = Aop @ v
    b = Bop.conj().T @ v
    # M = X Y* with X = [a, v], Y = [v, -b]; ||M|| = ||R_X R_Y*||
    _, Rx = np.linalg.qr(np.stack([a, v], axis=1))
    _, Ry = np.linalg.qr(np.stack([v, -b], axis=1))
    return float(np.linalg.norm(Rx @ Ry.conj().T, 2))


def _top_singular(s, y, z):
    """Largest singular value of ``[[s, -z], [y, 0]]`` with ``y, z >= 0``."""
    t = np.abs(s) ** 2 + y**2 + z**2
    disc = np.sqrt(np.maximum(t * t - 4 * (y * z) ** 2, 0.0))
    return np.sqrt((t + disc) / 2)


def _bb_parts(m: int, n: int, S: np.ndarray, T: np.ndarray, theta, phi):
    return _bb_split(coherent_vectors(m, theta, phi), coherent_vectors(n, theta, phi), S, T)


def _bb_split(vm: np.ndarray, vn: np.ndarray, S: np.ndarray, T: np.ndarray):
    Sv = vm @ S.T
    sS = np.einsum("ka,ka->k", vm.conj(), Sv)
    r = Sv - sS[:, None] * vm
    Tv = vn @ T.T
    sT = np.einsum("ka,ka->k", vn.conj(), Tv)
    q = vn @ T.conj() - sT.conj()[:, None] * vn
    return vm, vn, sS - sT, r, q


def bb_node_defects(m: int, n: int, S: np.ndarray, T: np.ndarray, theta, phi) -> np.ndarray:
    """``||(S (x) I) P_x - P_x (I (x) T)||`` at each point, ``P_x`` the top coherent projection."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    _, _, s, r, q = _bb_parts(m, n, S, T, theta, phi)
    return _top_singular(s, np.linalg.norm(r, axis=1), np.linalg.norm(q, axis=1))


def ab_node_defects(n: int, fvals, T: np.ndarray, theta, phi) -> np.ndarray:
    """``||f(x) P_x - P_x T|| = ||(T* - conj f(x)) v_x||`` at each point."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    v = coherent_vectors(n, theta, phi)
    w = v @ T.conj() - np.conj(np.asarray(fvals))[..., None] * v
    return np.linalg.norm(w, axis=-1)


def _check_square(X: np.ndarray, d: int, what: str):
    if X.shape != (d, d):
        raise DimensionMismatchError(f"{what} has shape {X.shape}, expected ({d}, {d})")


def bridge_norm_AB(rep, f, T, grid: QuadratureGrid | None = None, polish: bool = True) -> float:
    """``N_n(f, T) = sup_x ||f(x) alpha_x(P^n) - alpha_x(P^n) T||``.

    ``f`` may be a :class:`BandLimited` function or samples; samples are
    expanded to the band limit their grid resolves before the refined scan.
    """
    T = np.asarray(T, dtype=complex)
    _check_square(T, rep.dim, "T")
    if isinstance(f, FunctionSamples):
        if grid is not None and f.grid is not grid:
            raise DimensionMismatchError("samples live on a different grid")
        if np.iscomplexobj(f.values) and not np.allclose(np.imag(f.values), 0):
            vals = ab_node_defects(rep.n, f.values, T, f.grid.theta, f.grid.phi)
            return float(vals.max())
        f = fit_band_limited(f, f.grid.exact_degree // 2)
    fine = sup_grid(f.degree + rep.n + 2)

    def defect(t, p):
        return ab_node_defects(rep.n, f(t, p), T, t, p)

    val, _ = maximize_on_sphere(defect, fine, starts=4 if polish else 0)
    return val


def bridge_norm_BB(m: int, n: int, S, T, grid: QuadratureGrid | None = None, polish: bool = True) -> float:
    """``N_mn(S, T) = sup_x ||(S (x) I) alpha_x(P^m (x) P^n) - alpha_x(P^m (x) P^n)(I (x) T)||``.

    Only ``d_m``- and ``d_n``-dimensional products are formed.
    """
    S = np.asarray(S, dtype=complex)
    T = np.asarray(T, dtype=complex)
    _check_square(S, m + 1, "S")
    _check_square(T, n + 1, "T")
    fine = grid if grid is not None else sup_grid(m + n + 2)
    val, _ = maximize_on_sphere(lambda t, p: bb_node_defects(m, n, S, T, t, p), fine,
                                starts=4 if polish else 0)
    return val


# -- bridges on coordinate pairs ------------------------------------------------


class BridgeNorm:
    """A bridge seminorm on coordinate pairs with a working node set.

    ``__call__`` gives the value and coordinate subgradients on the working
    nodes; ``exact`` gives the sup over the sphere and where it is attained;
    ``add_node`` enlarges the working set.
    """

    left_dim: int
    right_dim: int

    def __init__(self, base_degree: int):
        g = sphere_grid(base_degree)
        self.theta = np.array(g.theta)
        self.phi = np.array(g.phi)
        self.fine = sup_grid(base_degree)

    def __len__(self) -> int:
        return self.theta.size

    def node_values(self, xa, xb, theta, phi, cached: bool = False) -> np.ndarray:
        raise NotImplementedError

    def _subgradient(self, xa, xb, theta: float, phi: float):
        raise NotImplementedError

    def __call__(self, xa, xb):
        vals = self.node_values(xa, xb, self.theta, self.phi, cached=True)
        k = int(np.argmax(vals))
        ga, gb = self._subgradient(xa, xb, self.theta[k], self.phi[k])
        return float(vals[k]), ga, gb

    def _node_gradients(self, xa, xb, theta, phi, weights):
        raise NotImplementedError

    def smooth(self, xa, xb, p: float):
        """p-norm of the working node values with its gradients."""
        vals = self.node_values(xa, xb, self.theta, self.phi, cached=True)
        val, w = pnorm(vals, p)
        keep = w > 1e-14
        ga, gb = self._node_gradients(xa, xb, self.theta[keep], self.phi[keep], w[keep])
        return val, ga, gb

    def exact(self, xa, xb) -> tuple[float, CosetPoint]:
        return maximize_on_sphere(lambda t, p: self.node_values(xa, xb, t, p), self.fine, starts=4)

    def add_node(self, x: CosetPoint):
        self.theta = np.append(self.theta, x.theta)
        self.phi = np.append(self.phi, x.phi)
        self._cache = None

    def _vectors(self, n: int, theta, phi, cached: bool) -> np.ndarray:
        if not cached:
            return coherent_vectors(n, theta, phi)
        cache = getattr(self, "_cache", None)
        if cache is None:
            cache = self._cache = {}
        if n not in cache:
            cache[n] = coherent_vectors(n, self.theta, self.phi)
        return cache[n]


class MatrixBridge(BridgeNorm):
    """``N_mn`` on Hermitian coordinates of ``B^m (+) B^n``."""

    def __init__(self, m: int, n: int):
        self.m, self.n = m, n
        self.left_dim, self.right_dim = (m + 1) ** 2, (n + 1) ** 2
        super().__init__(m + n + 2)

    def node_values(self, xa, xb, theta, phi, cached=False):
        S = from_coords(xa, self.m + 1)
        T = from_coords(xb, self.n + 1)
        vm = self._vectors(self.m, theta, phi, cached)
        vn = self._vectors(self.n, theta, phi, cached)
        _, _, s, r, q = _bb_split(vm, vn, S, T)
        return _top_singular(s, np.linalg.norm(r, axis=1), np.linalg.norm(q, axis=1))

    def _subgradient(self, xa, xb, theta, phi):
        return self._node_gradients(xa, xb, np.array([theta]), np.array([phi]), np.ones(1))

    def _node_gradients(self, xa, xb, theta, phi, weights):
        S = from_coords(xa, self.m + 1)
        T = from_coords(xb, self.n + 1)
        vm, vn, s, r, q = _bb_parts(self.m, self.n, S, T, theta, phi)
        y, z = np.linalg.norm(r, axis=1), np.linalg.norm(q, axis=1)
        M = np.zeros((theta.size, 2, 2))
        M[:, 0, 0], M[:, 0, 1], M[:, 1, 0] = s.real, -z, y
        U, _, Vt = np.linalg.svd(M)
        u, w = U[:, :, 0], Vt[:, 0, :]
        cs = weights * u[:, 0] * w[:, 0]
        cy = np.where(y > 0, weights * u[:, 1] * w[:, 0] / np.maximum(y, 1e-300), 0.0)
        cz = np.where(z > 0, weights * u[:, 0] * w[:, 1] / np.maximum(z, 1e-300), 0.0)
        GS = (vm.T * cs) @ vm.conj() + (vm.T * cy) @ r.conj()
        GT = -(vn.T * cs) @ vn.conj() - (vn.T * cz) @ q.conj()
        return gradient_coords(GS), gradient_coords(GT)


class FunctionBridge(BridgeNorm):
    """``N_n`` on (real harmonic coordinates of degree ``<= degree``) (+) Hermitian coordinates of ``B^n``."""

    def __init__(self, degree: int, n: int):
        self.degree, self.n = degree, n
        self.left_dim, self.right_dim = (degree + 1) ** 2, (n + 1) ** 2
        super().__init__(degree + n + 2)

    def node_values(self, xa, xb, theta, phi, cached=False):
        if cached:
            if getattr(self, "_cache", None) is None or "R" not in self._cache:
                self._vectors(self.n, theta, phi, True)
                self._cache["R"] = real_harmonics(self.degree, self.theta, self.phi)
            R = self._cache["R"]
        else:
            R = real_harmonics(self.degree, theta, phi)
        V = self._vectors(self.n, theta, phi, cached)
        T = from_coords(xb, self.n + 1)
        return np.linalg.norm(V @ T.T - (R @ xa)[:, None] * V, axis=1)

    def _subgradient(self, xa, xb, theta, phi):
        return self._node_gradients(xa, xb, np.array([theta]), np.array([phi]), np.ones(1))

    def _node_gradients(self, xa, xb, theta, phi, weights):
        R = real_harmonics(self.degree, theta, phi)
        V = coherent_vectors(self.n, theta, phi)
        T = from_coords(xb, self.n + 1)
        W = V @ T.T - (R @ xa)[:, None] * V
        nw = np.linalg.norm(W, axis=1)
        c = np.where(nw > 0, weights / np.maximum(nw, 1e-300), 0.0)
        Wc = W * c[:, None]
        ga = -np.einsum("ka,ka->k", Wc.conj(), V).real @ R
        return ga, gradient_coords(V.T @ Wc.conj())


def combined_seminorm(gamma: float, left: Summand, right: Summand, bridge: BridgeNorm | None,
                      label: str = "") -> DirectSumSeminorm:
    """``L_left v L_right v gamma^{-1} (N v N*)`` on Hermitian pairs.

    For self-adjoint pairs ``N(a*, b*) = N(a, b)``, so the adjoint branch is
    the same evaluation.
    """
    if not gamma > 0:
        raise InvalidParameterError("gamma must be positive")
    return DirectSumSeminorm(gamma, left, right, bridge, label)


def matrix_pair_seminorm(m: int, n: int, gamma: float) -> DirectSumSeminorm:
    """``L_mn`` on ``B^m (+) B^n``."""
    return combined_seminorm(gamma, MatrixSummand(make_irrep(m)), MatrixSummand(make_irrep(n)),
                             MatrixBridge(m, n), label=f"B{m}-B{n}")


def function_matrix_seminorm(n: int, gamma: float, degree: int | None = None) -> DirectSumSeminorm:
    """``L_n`` on ``A (+) B^n`` with ``A`` truncated to harmonics of degree ``<= degree``."""
    degree = n if degree is None else degree
    return combined_seminorm(gamma, FunctionSummand(degree), MatrixSummand(make_irrep(n)),
                             FunctionBridge(degree, n), label=f"A{degree}-B{n}")


# -- test families ----------------------------------------------------------------


def function_family(n: int, size: int = 64, seed: int = 0) -> list[np.ndarray]:
    """Real harmonic coordinates of degree ``<= n``: zonal harmonics, the basis, then seeded mixtures."""
    if size < 1:
        raise InvalidParameterError("family must be nonempty")
    dim = (n + 1) ** 2
    out = []
    for l in range(1, n + 1):
        p = np.zeros(dim)
        p[l * l] = 1.0
        out.append(p)
    for i in range(1, dim):
        if i not in {l * l for l in range(n + 1)}:
            out.append(np.eye(dim)[i])
    rng = np.random.default_rng(seed)
    while len(out) < size:
        p = rng.standard_normal(dim)
        p[0] = 0.0
        out.append(p)
    return out[:size]


@lru_cache(maxsize=32)
def _lower_images(n: int, grid: QuadratureGrid | None = None) -> np.ndarray:
    """``sigma-check^n`` of each real harmonic of degree ``<= n``, shape ``(params, d, d)``."""
    rep = make_irrep(n)
    grid = grid if grid is not None else sphere_grid(2 * n + 2)
    dim = (n + 1) ** 2
    out = np.array([lower_operator(rep, BandLimited(n, np.eye(dim)[i]), grid) for i in range(dim)])
    out.setflags(write=False)
    return out


def lower_of(n: int, params: np.ndarray) -> np.ndarray:
    return np.tensordot(params, _lower_images(n), axes=1)


def matrix_family(n: int, size: int = 64, seed: int = 0) -> list[np.ndarray]:
    """Hermitian elements of ``B^n``: Berezin images of the function family, then seeded random ones."""
    d = n + 1
    half = max(1, size // 2)
    out = [lower_of(n, p) for p in function_family(n, half, seed)]
    rng = np.random.default_rng(seed + 1)
    while len(out) < size:
        X = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        out.append((X + X.conj().T) / 2)
    return out[:size]


# -- bridge constants -----------------------------------------------------------


@dataclass(frozen=True)
class GammaEstimate:
    """Empirical ``gamma^A_n`` and ``gamma^B_n`` with the maximising elements."""

    n: int
    gamma_A: float
    gamma_B: float
    witness_A: np.ndarray
    witness_B: np.ndarray
    family_size: int
    seed: int

    @property
    def gamma(self) -> float:
        return max(self.gamma_A, self.gamma_B)


def _gamma_B_parts(n: int, g: QuadratureGrid):
    rep = make_irrep(n)
    V = coherent_vectors(n, g.theta, g.phi)
    den = matrix_lipschitz_parts(rep)

    def parts(x, p):
        T = from_coords(x, rep.dim)
        TV = V @ T.T
        mean = np.einsum("ka,ka->k", V.conj(), TV).real
        W = TV - mean[:, None] * V
        norms = np.linalg.norm(W, axis=1)
        num, gk = pnorm(norms, p)
        c = np.where(norms > 0, gk / np.maximum(norms, 1e-300), 0.0)
        # the mean term drops out: <w, v> = 0
        G = (V.T * c) @ W.conj()
        d, gd = den(T, p)
        return num, gradient_coords(G), d, gd

    return parts


def _gamma_A_parts(n: int, g: QuadratureGrid):
    V = coherent_vectors(n, g.theta, g.phi)
    R = real_harmonics(n, g.theta, g.phi)
    low = _lower_images(n, g)
    # sigma-check(Y_i) v_k for every node k and harmonic i
    LV = np.einsum("iab,kb->kia", low, V)
    lip = FunctionSummand(n)

    def parts(x, p):
        x = x.copy()
        x[0] = 0.0
        W = np.tensordot(LV, x, axes=([1], [0])) - (R @ x)[:, None] * V
        norms = np.linalg.norm(W, axis=1)
        num, gk = pnorm(norms, p)
        c = np.where(norms > 0, gk / np.maximum(norms, 1e-300), 0.0)
        Wc = W * c[:, None]
        g_num = (np.tensordot(LV.conj(), Wc, axes=([0, 2], [0, 1])).real
                 - np.einsum("ka,ka->k", Wc.conj(), V).real @ R)
        F = lip._fields @ x
        gn = np.linalg.norm(F, axis=1)
        d, gd = pnorm(gn, p)
        cd = np.where(gn > 0, gd / np.maximum(gn, 1e-300), 0.0)
        g_den = np.tensordot(cd[:, None] * F, lip._fields, axes=([0, 1], [0, 1]))
        g_num[0] = g_den[0] = 0.0
        return num, g_num, d, g_den

    return parts


def gamma_A_of(n: int, params: np.ndarray) -> float:
    """``N_n(f, sigma-check f) / L_A(f)`` with refined sup and Lipschitz evaluations."""
    f = BandLimited(n, params)
    L = FunctionSummand(n).exact_lipschitz(params)
    if L == 0:
        return 0.0
    return bridge_norm_AB(make_irrep(n), f, lower_of(n, params)) / L


def gamma_B_of(n: int, T: np.ndarray) -> float:
    """``N_n(sigma_T, T) / L^B_n(T)`` with refined sup and Lipschitz evaluations."""
    rep = make_irrep(n)
    L = MatrixSummand(rep).exact_lipschitz(to_coords(T))
    if L == 0:
        return 0.0
    fine = sup_grid(2 * n + 2)
    val, _ = maximize_on_sphere(lambda t, p: ab_node_defects(n, symbol_values(n, T, t, p), T, t, p),
                                fine, starts=4)
    return val / L


def gamma_estimates(n: int, grid: QuadratureGrid | None = None, family_size: int = 64, seed: int = 0,
                    polish: int = 3, screen: int = 16) -> GammaEstimate:
    """Empirical bridge constants for ``N_n`` with Berezin partners.

    ``gamma^A_n`` maximises ``N_n(f, sigma-check^n f) / L_A(f)`` over functions of
    degree ``<= n``; ``gamma^B_n`` maximises ``N_n(sigma^n_T, T) / L^B_n(T)``.
    Every member of the seeded test families is scored, the best ``screen``
    get a short ascent and the leading ``polish`` a long one.  The reported
    ratios are re-evaluated with refined sups.  ``grid`` carries the working
    nodes and defaults to one exact in degree ``2n + 2``.
    """
    grid = grid if grid is not None else sphere_grid(2 * n + 2)
    fa = smoothed_ratio_search(_gamma_A_parts(n, grid), [("family", p) for p in function_family(n, family_size, seed)],
                               polish=polish, screen=screen)
    fb = smoothed_ratio_search(_gamma_B_parts(n, grid),
                               [("family", to_coords(T)) for T in matrix_family(n, family_size, seed)],
                               polish=polish, screen=screen)
    TA = fa.x
    TB = from_coords(fb.x, n + 1)
    return GammaEstimate(n, gamma_A_of(n, TA), gamma_B_of(n, TB), TA, TB, family_size, seed)


# -- verification -------------------------------------------------------------------


@dataclass
class BridgeReport:
    """Outcome of checking the bridge condition on a test family.

    ``worst_gap`` is the largest ``min_b max(L_right(b), gamma^{-1} N(a, b)) - 1``
    over normalised family elements ``a`` (and symmetrically), so
    ``passed`` holds exactly when ``worst_gap <= epsilon``.
    """

    gamma: float
    epsilon: float
    family_size: int
    worst_gap: float
    passed: bool
    nondegenerate: bool
    witnesses: list = field(default_factory=list)

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"{status} gamma={self.gamma:.6g} epsilon={self.epsilon:g} family={self.family_size} "
                f"worst_gap={self.worst_gap:.6g} nondegenerate={self.nondegenerate}")


def _partner_search(objective, x0: np.ndarray, target: float) -> tuple[float, np.ndarray]:
    val = objective(x0)[0]
    if val <= target:
        return val, x0
    res = minimize(objective, x0, jac=True, method="L-BFGS-B",
                   options={"maxiter": 200, "gtol": 1e-10, "ftol": 1e-12})
    return (float(res.fun), res.x) if res.fun < val else (val, x0)


def verify_bridge(
    gamma: float,
    N: BridgeNorm,
    L_left: Summand,
    L_right: Summand,
    family_left: list[np.ndarray],
    family_right: list[np.ndarray],
    partner_left=None,
    partner_right=None,
    epsilon: float = 0.05,
) -> BridgeReport:
    """Check ``forall a exists b: L_right(b) v gamma^{-1} N(a, b) <= L_left(a) + epsilon`` and symmetrically.

    Elements are normalised to ``L = 1``; elements with ``L = 0`` are scalars
    and are matched by the scalar on the other side.  Each partner search
    starts at ``partner_*(a)`` and descends the convex function
    ``max(L_right(b), gamma^{-1} N(a, b))`` on the working node set; the
    deficit is then measured with exact sups.
    """
    if not gamma > 0 or not epsilon > 0:
        raise InvalidParameterError("gamma and epsilon must be positive")
    worst = -np.inf
    witnesses = []
    sides = (
        (family_left, L_left, L_right, partner_left, False),
        (family_right, L_right, L_left, partner_right, True),
    )
    for family, own, other, partner, swapped in sides:
        for a in family:
            a = np.asarray(a, dtype=float)
            la = own.exact_lipschitz(a)
            if la <= 1e-12:
                # scalar: the matching scalar partner has N = 0 and L = 0
                scalar = (a @ own.unit) / (own.unit @ own.unit)
                b = scalar * other.unit
                gap = -1.0
            else:
                a = a / la
                b0 = partner(a) if partner is not None else np.zeros(other.dim)

                def nval(bx, a=a):
                    return N(bx, a) if swapped else N(a, bx)

                def objective(bx):
                    lb, gb = other.lipschitz(bx)
                    nv, ga, gb2 = nval(bx)
                    gn = ga if swapped else gb2
                    if nv / gamma >= lb:
                        return nv / gamma, gn / gamma
                    return lb, gb

                _, b = _partner_search(objective, b0, 1.0)
                exact_n = (N.exact(b, a) if swapped else N.exact(a, b))[0]
                gap = max(other.exact_lipschitz(b), exact_n / gamma) - 1.0
            worst = max(worst, gap)
            witnesses.append((a, b, gap) if not swapped else (b, a, gap))
    one = L_left.unit * 1.0
    nondeg = N.exact(one, np.zeros(L_right.dim))[0] / gamma > 0
    size = len(family_left) + len(family_right)
    return BridgeReport(gamma, epsilon, size, float(worst), bool(worst <= epsilon and nondeg), bool(nondeg),
                        witnesses)


def verify_function_bridge(n: int, gamma: float, family_size: int = 64, seed: int = 0,
                           epsilon: float = 0.05) -> BridgeReport:
    """Bridge check for ``gamma^{-1} N_n`` between ``(A, L_A)`` and ``(B^n, L^B_n)``.

    ``A`` is truncated to degree ``n``; partners start at the Berezin maps.
    """
    rep = make_irrep(n)
    left, right = FunctionSummand(n), MatrixSummand(rep)
    bridge = FunctionBridge(n, n)
    fam_a = function_family(n, family_size, seed)
    fam_b = [to_coords(T) for T in matrix_family(n, family_size, seed)]
    g = sphere_grid(2 * n + 2)
    R = _real_harmonics_projector(n)

    def to_matrix(p):
        return to_coords(lower_of(n, p))

    def to_function(xb):
        T = from_coords(xb, rep.dim)
        return R @ symbol_values(n, T, g.theta, g.phi)

    return verify_bridge(gamma, bridge, left, right, fam_a, fam_b, to_matrix, to_function, epsilon)


@lru_cache(maxsize=32)
def _real_harmonics_projector(n: int) -> np.ndarray:
    g = sphere_grid(2 * n + 2)
    P = real_harmonics(n, g.theta, g.phi).T * g.weights
    P.setflags(write=False)
    return P


# -- amalgamation ---------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class AmalgamSpec:
    """Two coherent bimodules ``D = C(G/H, B^m)``, ``E = C(G/H, B^n)`` glued over ``A = C(G/H)``.

    ``d0 = omega_m`` and ``e0 = omega_n``; the amalgam is ``C(G/H, B^m (x) B^n)``
    with ``f0 = omega_m (x) omega_n``.  ``f0_scale`` multiplies ``f0`` and exists
    so that degenerate gluings can be represented.
    """

    m: int
    n: int
    gamma_D: float
    gamma_E: float
    f0_scale: float = 1.0

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise InvalidParameterError("m and n must be positive")
        if not (self.gamma_D > 0 and self.gamma_E > 0):
            raise InvalidParameterError("bridge constants must be positive")


@dataclass(frozen=True)
class Amalgam:
    spec: AmalgamSpec
    gamma: float

    def N_D(self, S: np.ndarray, f: BandLimited) -> float:
        """``||S d0 - d0 f|| = sup_x ||(S - f(x)) v_x||`` in ``C(G/H, B^m)``, ``f`` real."""
        return bridge_norm_AB(make_irrep(self.spec.m), f, np.asarray(S, dtype=complex).conj().T)

    def N_E(self, f: BandLimited, T: np.ndarray) -> float:
        """``||f e0 - e0 T||`` in ``C(G/H, B^n)``."""
        return bridge_norm_AB(make_irrep(self.spec.n), f, T)

    def N_F(self, S: np.ndarray, T: np.ndarray) -> float:
        """``||S f0 - f0 T||`` in the amalgam."""
        return abs(self.spec.f0_scale) * bridge_norm_BB(self.spec.m, self.spec.n, S, T)


def amalgamate(spec: AmalgamSpec) -> Amalgam:
    """Glue the two bridges; the result carries ``N_F`` and the constant ``gamma_D + gamma_E``."""
    if spec.f0_scale == 0:
        raise DegenerateAmalgamError("f0 = d0 e0 vanishes")
    return Amalgam(spec, spec.gamma_D + spec.gamma_E)
