"""Quadrature on G/H = S^2, band-limited functions and sup-norm search."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from numpy.polynomial import legendre

from .errors import InvalidParameterError, UnsupportedDegreeError
from .group import CosetPoint, make_irrep, sphere_to_cartesian

MAX_EXACT_DEGREE = 512


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    """Weighted nodes on the sphere; weights are normalised to total mass 1."""

    theta: np.ndarray
    phi: np.ndarray
    weights: np.ndarray
    exact_degree: int
    scheme: str = "gauss"

    def __len__(self) -> int:
        return self.theta.size

    @property
    def nodes(self) -> list[CosetPoint]:
        return [CosetPoint(float(t), float(p)) for t, p in zip(self.theta, self.phi)]

    @property
    def cartesian(self) -> np.ndarray:
        return sphere_to_cartesian(self.theta, self.phi)

    def integrate(self, values) -> complex | float:
        values = np.asarray(values)
        return np.tensordot(self.weights, values, axes=(0, 0))


def _lobatto_rule(k: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Lobatto-Legendre nodes/weights on [-1, 1] with ``k`` points (exact to degree 2k-3)."""
    pk = legendre.Legendre.basis(k - 1)
    inner = np.sort(pk.deriv().roots().real)
    x = np.concatenate([[-1.0], inner, [1.0]])
    w = 2.0 / (k * (k - 1) * pk(x) ** 2)
    return x, w


@lru_cache(maxsize=None)
def sphere_grid(exact_degree: int, scheme: str = "gauss") -> QuadratureGrid:
    """Product grid exact for spherical harmonics of degree ``<= exact_degree``.

    ``scheme="gauss"`` uses Gauss-Legendre nodes in ``cos(theta)``;
    ``scheme="lobatto"`` uses Gauss-Lobatto nodes, which include both poles
    (each pole is a single node).  Both are uniform in ``phi``.
    """
    if int(exact_degree) != exact_degree or exact_degree < 0:
        raise InvalidParameterError(f"exact_degree must be a non-negative integer, got {exact_degree!r}")
    exact_degree = int(exact_degree)
    if exact_degree > MAX_EXACT_DEGREE:
        raise UnsupportedDegreeError(f"exact_degree {exact_degree} exceeds {MAX_EXACT_DEGREE}")
    n_phi = exact_degree + 1
    if scheme == "gauss":
        z, wz = legendre.leggauss(exact_degree // 2 + 1)
    elif scheme == "lobatto":
        z, wz = _lobatto_rule(max(exact_degree // 2 + 2, 2))
    else:
        raise InvalidParameterError(f"unknown scheme {scheme!r}")
    order = np.argsort(-z)  # north pole first
    z, wz = z[order], wz[order] / 2.0
    phis = 2 * np.pi * np.arange(n_phi) / n_phi
    theta, phi, weights = [], [], []
    for zi, wi in zip(z, wz):
        t = float(np.arccos(np.clip(zi, -1.0, 1.0)))
        if abs(abs(zi) - 1.0) < 1e-15:
            theta.append(np.array([t]))
            phi.append(np.zeros(1))
            weights.append(np.array([wi]))
        else:
            theta.append(np.full(n_phi, t))
            phi.append(phis)
            weights.append(np.full(n_phi, wi / n_phi))
    theta, phi, weights = (np.concatenate(a) for a in (theta, phi, weights))
    for a in (theta, phi, weights):
        a.setflags(write=False)
    return QuadratureGrid(theta, phi, weights, exact_degree, scheme)


def sup_grid(exact_degree: int, factor: int = 4) -> QuadratureGrid:
    """Pole-containing grid ``factor`` times denser than the quadrature grid of ``exact_degree``."""
    return sphere_grid(factor * max(int(exact_degree), 1), "lobatto")


@dataclass(frozen=True, eq=False)
class FunctionSamples:
    """Values of a function on the nodes of a grid."""

    grid: QuadratureGrid
    values: np.ndarray

    def __post_init__(self):
        if np.shape(self.values) != (len(self.grid),):
            raise InvalidParameterError(
                f"{np.size(self.values)} values for a grid with {len(self.grid)} nodes"
            )

    def integral(self):
        return self.grid.integrate(self.values)

    def __sub__(self, other: "FunctionSamples") -> "FunctionSamples":
        if other.grid is not self.grid:
            raise InvalidParameterError("samples live on different grids")
        return FunctionSamples(self.grid, self.values - other.values)


# -- spherical harmonics ---------------------------------------------------
# Coefficients of degree l are stored with m running from l down to -l, which
# matches the weight ordering of make_irrep(2l); angular momentum operators
# then act on coefficient blocks by the irrep's generator matrices.


def harmonic_index(degree: int) -> list[tuple[int, int]]:
    return [(l, m) for l in range(degree + 1) for m in range(l, -l - 1, -1)]


def _legendre_table(degree: int, theta: np.ndarray) -> dict:
    """Normalised associated Legendre values ``y_l^m(cos theta)``, ``m >= 0``, Condon-Shortley phase included."""
    x, s = np.cos(theta), np.sin(theta)
    y = {(0, 0): np.full(theta.shape, 1 / np.sqrt(4 * np.pi))}
    for m in range(degree + 1):
        if m > 0:
            y[m, m] = -np.sqrt((2 * m + 1) / (2 * m)) * s * y[m - 1, m - 1]
        if m < degree:
            y[m + 1, m] = np.sqrt(2 * m + 3) * x * y[m, m]
        for l in range(m + 2, degree + 1):
            a = np.sqrt((4 * l * l - 1) / (l * l - m * m))
            b = np.sqrt(((l - 1) ** 2 - m * m) / (4 * (l - 1) ** 2 - 1))
            y[l, m] = a * (x * y[l - 1, m] - b * y[l - 2, m])
    return y


def harmonic_matrix(degree: int, theta, phi) -> np.ndarray:
    """Complex ``Y_lm`` (orthonormal over the unnormalised sphere) at the nodes."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    y = _legendre_table(degree, theta)
    e = [np.ones(phi.shape, dtype=complex)]
    step = np.exp(1j * phi)
    for _ in range(degree):
        e.append(e[-1] * step)
    cols = []
    for l, m in harmonic_index(degree):
        if m >= 0:
            cols.append(y[l, m] * e[m])
        else:
            cols.append((-1) ** m * y[l, -m] * e[-m].conj())
    return np.stack(cols, axis=-1)


@lru_cache(maxsize=None)
def real_to_complex(degree: int) -> np.ndarray:
    """Map real harmonic coordinates to complex ``Y_lm`` coefficients.

    Real basis per degree: ``Y_l0``, and for ``m > 0`` the pair
    ``sqrt(2) (-1)^m Re Y_lm``, ``sqrt(2) (-1)^m Im Y_lm``.
    """
    idx = {lm: i for i, lm in enumerate(harmonic_index(degree))}
    size = (degree + 1) ** 2
    C = np.zeros((size, size), dtype=complex)
    col = 0
    for l in range(degree + 1):
        C[idx[(l, 0)], col] = 1.0
        col += 1
        for m in range(1, l + 1):
            s = (-1) ** m / np.sqrt(2)
            # Re Y_lm = (Y_lm + (-1)^m Y_l,-m) / 2
            C[idx[(l, m)], col] = s
            C[idx[(l, -m)], col] = s * (-1) ** m
            col += 1
            # Im Y_lm = (Y_lm - (-1)^m Y_l,-m) / 2i
            C[idx[(l, m)], col] = s / 1j
            C[idx[(l, -m)], col] = -s * (-1) ** m / 1j
            col += 1
    C.setflags(write=False)
    return C


@lru_cache(maxsize=None)
def _angular_momentum_blocks(degree: int) -> np.ndarray:
    """Block-diagonal ``(L_x, L_y, L_z)`` acting on complex coefficient vectors."""
    size = (degree + 1) ** 2
    out = np.zeros((3, size, size), dtype=complex)
    start = 0
    for l in range(degree + 1):
        d = 2 * l + 1
        if l > 0:
            out[:, start:start + d, start:start + d] = make_irrep(2 * l).generators
        start += d
    out.setflags(write=False)
    return out


class BandLimited:
    """A real function on the sphere spanned by harmonics of degree ``<= degree``.

    Normalisation is such that ``Y_00 = 1``, i.e. coordinates are taken against
    the unit-mass invariant measure.
    """

    def __init__(self, degree: int, params):
        self.degree = int(degree)
        self.params = np.asarray(params, dtype=float)
        if self.params.shape != ((self.degree + 1) ** 2,):
            raise InvalidParameterError("parameter vector has the wrong length")

    @classmethod
    def constant(cls, value: float, degree: int = 0) -> "BandLimited":
        p = np.zeros((degree + 1) ** 2)
        p[0] = value
        return cls(degree, p)

    @property
    def coefficients(self) -> np.ndarray:
        # sqrt(4 pi) rescales Y_lm to the unit-mass measure
        return np.sqrt(4 * np.pi) * (real_to_complex(self.degree) @ self.params)

    def __call__(self, theta, phi) -> np.ndarray:
        Y = harmonic_matrix(self.degree, theta, phi)
        return (Y @ self.coefficients).real

    def rotation_field(self, theta, phi) -> np.ndarray:
        """``r x grad f`` at the given points, shape ``(..., 3)``; its length is ``|grad f|``."""
        Y = harmonic_matrix(self.degree, theta, phi)
        Lc = _angular_momentum_blocks(self.degree) @ self.coefficients
        return (1j * (Y @ Lc.T)).real

    def gradient_norm(self, theta, phi) -> np.ndarray:
        return np.linalg.norm(self.rotation_field(theta, phi), axis=-1)

    def sample(self, grid: QuadratureGrid) -> FunctionSamples:
        return FunctionSamples(grid, self(grid.theta, grid.phi))

    def __add__(self, other: "BandLimited") -> "BandLimited":
        d = max(self.degree, other.degree)
        return BandLimited(d, _pad(self.params, d) + _pad(other.params, d))

    def __mul__(self, c: float) -> "BandLimited":
        return BandLimited(self.degree, c * self.params)

    __rmul__ = __mul__

    def __neg__(self) -> "BandLimited":
        return BandLimited(self.degree, -self.params)


def _pad(p: np.ndarray, degree: int) -> np.ndarray:
    out = np.zeros((degree + 1) ** 2)
    out[: p.size] = p
    return out


def real_harmonics(degree: int, theta, phi) -> np.ndarray:
    """Values of the unit-mass real harmonic basis, shape ``(..., (degree+1)^2)``."""
    Y = harmonic_matrix(degree, theta, phi)
    return np.sqrt(4 * np.pi) * (Y @ real_to_complex(degree)).real


@lru_cache(maxsize=None)
def _real_harmonics_on_grid(degree: int, grid: QuadratureGrid) -> np.ndarray:
    R = real_harmonics(degree, grid.theta, grid.phi)
    R.setflags(write=False)
    return R


def fit_band_limited(samples: FunctionSamples, degree: int) -> BandLimited:
    """Recover the harmonic expansion of a band-limited real function from grid samples."""
    grid = samples.grid
    if 2 * degree > grid.exact_degree:
        raise UnsupportedDegreeError(
            f"projecting degree {degree} needs exactness {2 * degree}, grid has {grid.exact_degree}"
        )
    R = _real_harmonics_on_grid(degree, grid)
    params = R.T @ (grid.weights * np.real(samples.values))
    return BandLimited(degree, params)


def cos_theta() -> BandLimited:
    """``cos(theta)`` as a degree-1 expansion."""
    p = np.zeros(4)
    p[1] = 1 / np.sqrt(3)
    return BandLimited(1, p)


# -- sup search ------------------------------------------------------------


def _to_angles(y: np.ndarray) -> tuple[float, float]:
    r = np.linalg.norm(y)
    if r == 0:
        return 0.0, 0.0
    return float(np.arccos(np.clip(y[2] / r, -1, 1))), float(np.mod(np.arctan2(y[1], y[0]), 2 * np.pi))


def maximize_on_sphere(
    fun: Callable[[np.ndarray, np.ndarray], np.ndarray],
    grid: QuadratureGrid,
    starts: int = 6,
    tol: float = 1e-5,
    max_iter: int = 300,
) -> tuple[float, CosetPoint]:
    """Maximise a smooth function on the sphere: grid scan plus batched compass search.

    ``fun`` takes arrays ``(theta, phi)`` and returns real values.  The best
    ``starts`` well-separated grid nodes are refined together; each step
    evaluates an 8-point tangent stencil around every start in one call and
    halves the step where nothing improves.  At a smooth maximum the value
    error is of order ``tol**2``.  The returned value never falls below the
    best grid value.
    """
    vals = np.asarray(fun(grid.theta, grid.phi), dtype=float)
    best_i = int(np.argmax(vals))
    best_val, best_pt = float(vals[best_i]), (float(grid.theta[best_i]), float(grid.phi[best_i]))
    if starts <= 0:
        return best_val, CosetPoint.wrap(*best_pt)
    order = np.argsort(-vals, kind="stable")
    xyz = grid.cartesian
    ranked = xyz[order]
    sep = np.cos(np.pi / max(grid.exact_degree, 4))
    free = np.ones(len(order), dtype=bool)
    chosen: list[int] = []
    while len(chosen) < starts and free.any():
        k = int(np.argmax(free))
        chosen.append(int(order[k]))
        free &= ranked @ ranked[k] < sep

    x = xyz[chosen].copy()
    fx = vals[chosen].copy()
    step = np.full(len(chosen), np.pi / max(grid.exact_degree, 4))
    ang = np.arange(8) * np.pi / 4
    for _ in range(max_iter):
        live = step > tol
        if not live.any():
            break
        # orthonormal tangent frame at each live point
        p = x[live]
        a = np.where(np.abs(p[:, :1]) < 0.9, [[1.0, 0, 0]], [[0, 1.0, 0]])
        e1 = a - (a * p).sum(1, keepdims=True) * p
        e1 /= np.linalg.norm(e1, axis=1, keepdims=True)
        e2 = np.stack([p[:, 1] * e1[:, 2] - p[:, 2] * e1[:, 1], p[:, 2] * e1[:, 0] - p[:, 0] * e1[:, 2],
                       p[:, 0] * e1[:, 1] - p[:, 1] * e1[:, 0]], axis=1)
        h = step[live][:, None, None]
        cand = p[:, None] + h * (np.cos(ang)[None, :, None] * e1[:, None] + np.sin(ang)[None, :, None] * e2[:, None])
        cand /= np.linalg.norm(cand, axis=2, keepdims=True)
        flat = cand.reshape(-1, 3)
        t = np.arccos(np.clip(flat[:, 2], -1, 1))
        ph = np.mod(np.arctan2(flat[:, 1], flat[:, 0]), 2 * np.pi)
        cv = np.asarray(fun(t, ph), dtype=float).reshape(-1, 8)
        k = np.argmax(cv, axis=1)
        gain = cv[np.arange(len(k)), k]
        idx = np.flatnonzero(live)
        up = gain > fx[idx]
        x[idx[up]] = cand[up, k[up]]
        fx[idx[up]] = gain[up]
        step[idx[~up]] *= 0.5
    j = int(np.argmax(fx))
    if fx[j] > best_val:
        best_val, best_pt = float(fx[j]), _to_angles(x[j])
    return best_val, CosetPoint.wrap(*best_pt)
