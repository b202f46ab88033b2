"""SU(2) irreducible representations, coherent states and the top-component embedding.

The irrep of tensor power ``n`` is the spin ``n/2`` representation of dimension
``n + 1``.  Basis vectors are ordered by decreasing weight, so index 0 is the
highest-weight vector.  Points of the sphere are reached from the north pole by
the fixed section ``g(theta, phi) = exp(-i phi J_z) exp(-i theta J_y)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import expm
from scipy.special import gammaln

from .errors import InvalidParameterError


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Irrep:
    """Spin ``n/2`` representation with standard ladder matrices."""

    n: int
    dim: int
    j_z: np.ndarray
    j_plus: np.ndarray
    j_minus: np.ndarray
    highest_index: int = 0

    @property
    def spin(self) -> float:
        return self.n / 2

    @property
    def j_x(self) -> np.ndarray:
        return (self.j_plus + self.j_minus) / 2

    @property
    def j_y(self) -> np.ndarray:
        return (self.j_plus - self.j_minus) / 2j

    @property
    def generators(self) -> np.ndarray:
        """Stack ``(J_x, J_y, J_z)`` of shape ``(3, dim, dim)``."""
        return np.stack([self.j_x, self.j_y, self.j_z.astype(complex)])

    @property
    def highest_weight_vector(self) -> np.ndarray:
        xi = np.zeros(self.dim, dtype=complex)
        xi[self.highest_index] = 1.0
        return xi

    @property
    def highest_weight_projection(self) -> np.ndarray:
        xi = self.highest_weight_vector
        return np.outer(xi, xi.conj())


@lru_cache(maxsize=None)
def make_irrep(n: int) -> Irrep:
    """Return the irreducible representation with highest weight ``n`` times the fundamental one."""
    if int(n) != n or n < 1:
        raise InvalidParameterError(f"tensor power must be a positive integer, got {n!r}")
    n = int(n)
    j = n / 2
    m = j - np.arange(n + 1)
    # J_+ |j, m> = sqrt(j(j+1) - m(m+1)) |j, m+1>
    c = np.sqrt(j * (j + 1) - m[1:] * (m[1:] + 1))
    j_plus = np.diag(c, k=1)
    return Irrep(
        n=n,
        dim=n + 1,
        j_z=_frozen(np.diag(m)),
        j_plus=_frozen(j_plus),
        j_minus=_frozen(j_plus.T.copy()),
    )


@dataclass(frozen=True)
class CosetPoint:
    """A point of G/H = S^2 in polar coordinates (radians)."""

    theta: float
    phi: float

    def __post_init__(self):
        if not 0.0 <= self.theta <= np.pi:
            raise InvalidParameterError(f"theta={self.theta} outside [0, pi]")
        if not 0.0 <= self.phi < 2 * np.pi:
            raise InvalidParameterError(f"phi={self.phi} outside [0, 2pi)")

    @classmethod
    def wrap(cls, theta: float, phi: float) -> "CosetPoint":
        """Normalise arbitrary angles onto the canonical chart."""
        theta = float(np.mod(theta, 2 * np.pi))
        if theta > np.pi:
            theta = 2 * np.pi - theta
            phi = phi + np.pi
        return cls(theta, float(np.mod(phi, 2 * np.pi)))

    @property
    def unit_vector(self) -> np.ndarray:
        return sphere_to_cartesian(self.theta, self.phi)


NORTH_POLE = CosetPoint(0.0, 0.0)


def sphere_to_cartesian(theta, phi) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    st = np.sin(theta)
    return np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)], axis=-1)


def group_unitary(rep: Irrep, x: CosetPoint) -> np.ndarray:
    """``U^n(g_x)`` for the section ``exp(-i phi J_z) exp(-i theta J_y)``."""
    rz = np.diag(np.exp(-1j * x.phi * np.diag(rep.j_z)))
    return rz @ expm(-1j * x.theta * rep.j_y)


def rotation_unitary(rep: Irrep, axis, angle: float) -> np.ndarray:
    """``exp(-i angle u.J)``; rotates the sphere by ``angle`` about the unit axis ``u``."""
    u = np.asarray(axis, dtype=float)
    u = u / np.linalg.norm(u)
    return expm(-1j * angle * np.tensordot(u, rep.generators, axes=1))


@lru_cache(maxsize=None)
def _log_binom(n: int) -> np.ndarray:
    k = np.arange(n + 1)
    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)


def coherent_vectors(n: int, theta, phi) -> np.ndarray:
    """Coherent vectors ``U^n(g_x) xi^n`` for arrays of angles; shape ``(..., n + 1)``.

    Closed form of the Wigner function ``d^j_{m j}``; agrees with
    :func:`group_unitary` applied to the highest-weight vector.
    """
    theta = np.asarray(theta, dtype=float)[..., None]
    phi = np.asarray(phi, dtype=float)[..., None]
    k = np.arange(n + 1)
    c = np.cos(theta / 2)
    s = np.sin(theta / 2)
    amp = np.exp(0.5 * _log_binom(n)) * c ** (n - k) * s**k
    return amp * np.exp(-1j * (n / 2 - k) * phi)


def coherent_state(rep: Irrep, x: CosetPoint) -> tuple[np.ndarray, np.ndarray]:
    """Return the coherent unit vector at ``x`` and its rank-one projection ``alpha_x(P^n)``."""
    v = coherent_vectors(rep.n, x.theta, x.phi)
    return v, np.outer(v, v.conj())


def coherent_projections(n: int, theta, phi) -> np.ndarray:
    v = coherent_vectors(n, theta, phi)
    return v[..., :, None] * v[..., None, :].conj()


@lru_cache(maxsize=None)
def highest_weight_embedding(m: int, n: int) -> np.ndarray:
    """Isometry ``V`` from ``H^{m+n}`` onto the top component of ``H^m (x) H^n``.

    Column 0 is ``xi^m (x) xi^n``; each further column is the renormalised
    image of the previous one under the total lowering operator.
    """
    rm, rn = make_irrep(m), make_irrep(n)
    lower = np.kron(rm.j_minus, np.eye(rn.dim)) + np.kron(np.eye(rm.dim), rn.j_minus)
    d = m + n + 1
    V = np.zeros((rm.dim * rn.dim, d), dtype=complex)
    col = np.kron(rm.highest_weight_vector, rn.highest_weight_vector)
    for k in range(d):
        V[:, k] = col
        col = lower @ col
        norm = np.linalg.norm(col)
        if k < d - 1:
            col = col / norm
    return _frozen(V)


def top_projection(m: int, n: int) -> np.ndarray:
    """``Pi^{mn} = V V^*``."""
    V = highest_weight_embedding(m, n)
    return V @ V.conj().T
