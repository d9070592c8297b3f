"""4x4 symplectic linear algebra in the section coordinates (phi, s, rho, u).

The symplectic form is drho^dphi + ds^du.  With the basis order fixed as
(phi, s, rho, u) its matrix ``J`` satisfies ``J[rho, phi] = 1`` and
``J[s, u] = 1``; a matrix ``M`` is symplectic when ``M.T @ J @ M == J``.
"""

from __future__ import annotations

import math
from collections import namedtuple
from dataclasses import dataclass

import mpmath
import numpy as np

from .config import EXTENDED_PREC, get_tolerances
from ._numeric import object_matrix, to_mpf
from .errors import NonFinite

TWO_PI = 2.0 * math.pi

PHI, S, RHO, U = 0, 1, 2, 3
COORDS = ("phi", "s", "rho", "u")

J = np.zeros((4, 4))
J[RHO, PHI] = 1.0
J[PHI, RHO] = -1.0
J[S, U] = 1.0
J[U, S] = -1.0
J.setflags(write=False)

IDENTITY = np.eye(4)
IDENTITY.setflags(write=False)


def wrap_angle(phi):
    """Reduce an angle to [0, 2*pi)."""
    w = math.fmod(phi, TWO_PI)
    if w < 0.0:
        w += TWO_PI
    if w >= TWO_PI:
        w = 0.0
    return w


def angle_diff(a, b):
    """Signed difference a - b reduced to [-pi, pi)."""
    d = math.fmod(a - b + math.pi, TWO_PI)
    if d < 0.0:
        d += TWO_PI
    return d - math.pi


_Vec4Base = namedtuple("_Vec4Base", COORDS)


class Vec4(_Vec4Base):
    """A point of the section; ``phi`` is always stored in [0, 2*pi)."""

    __slots__ = ()

    def __new__(cls, phi, s, rho, u):
        return super().__new__(cls, wrap_angle(float(phi)), float(s), float(rho), float(u))

    @classmethod
    def from_array(cls, a):
        return cls(*(float(x) for x in a))

    def as_array(self):
        return np.array(self, dtype=float)

    def __add__(self, other):
        return Vec4(*(a + b for a, b in zip(self, other)))

    def __sub__(self, other):
        """Componentwise difference; the angle part is the signed shortest arc."""
        return np.array(
            [angle_diff(self.phi, other[0]), self.s - other[1], self.rho - other[2], self.u - other[3]]
        )


def as_mat4(m):
    a = np.asarray(m, dtype=float)
    if a.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {a.shape}")
    return a


def mat_mul(a, b):
    return np.matmul(a, b)


def symplectic_residual(m):
    """Return ``m.T J m - J`` and the entrywise scale of its rounding error."""
    m = np.asarray(m)
    resid = np.swapaxes(m, -1, -2) @ J @ m - J
    am = np.abs(m)
    scale = np.swapaxes(am, -1, -2) @ np.abs(J) @ am
    return resid, scale


def is_symplectic(m, tol=None):
    """Check ``m.T J m == J`` entrywise.

    Each residual entry is compared against ``tol * max(1, (|m|.T |J| |m|)_ij)``,
    which reduces to an absolute test for well scaled matrices and keeps the
    test meaningful for graded products whose entries reach ``lambda**-n``.
    """
    if tol is None:
        tol = get_tolerances().tol_spec
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    m = np.asarray(m)
    if m.dtype == object:
        resid = m.T.dot(J).dot(m) - J
        return all(abs(x) <= tol for x in resid.flat)
    if not np.all(np.isfinite(m)):
        return False
    resid, scale = symplectic_residual(m)
    return bool(np.all(np.abs(resid) <= tol * np.maximum(1.0, scale)))


def symplectic_inverse(m):
    """Inverse of a symplectic matrix, ``-J m.T J``."""
    return -J @ np.asarray(m).T @ J


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: tuple
    unit_circle_distances: tuple
    backward_error: float = 0.0

    @property
    def min_unit_circle_distance(self):
        return min(self.unit_circle_distances)


def unit_circle_distance(z):
    return abs(abs(z) - 1.0)


def dense_eigenvalues(m, mode="standard"):
    """Eigenvalues of a 4x4 matrix by a general dense eigensolver.

    This is deliberately blind to symplectic structure: it is the oracle for
    the palindromic pipeline.  ``backward_error`` is the largest
    ``sigma_min(m - z I) / ||m||_2`` over the returned eigenvalues.
    """
    if mode == "standard":
        a = as_mat4(m)
        if not np.all(np.isfinite(a)):
            raise NonFinite("matrix has non-finite entries")
        eig = np.linalg.eigvals(a)
        norm = np.linalg.norm(a, 2)
        berr = 0.0
        if norm > 0:
            for z in eig:
                smin = np.linalg.svd(a - z * np.eye(4), compute_uv=False)[-1]
                berr = max(berr, smin / norm)
        eigs = tuple(complex(z) for z in eig)
        return Spectrum(eigs, tuple(unit_circle_distance(z) for z in eigs), float(berr))

    with mpmath.workprec(EXTENDED_PREC + 64):
        mm = mpmath.matrix(object_matrix(np.asarray(m, dtype=object), to_mpf).tolist())
        for x in mm:
            if not mpmath.isfinite(x):
                raise NonFinite("matrix has non-finite entries")
        eig = mpmath.eig(mm, left=False, right=False)
        norm = mpmath.mnorm(mm, 1)
        berr = 0.0
        if norm:
            for z in eig:
                sv = mpmath.svd_c(mm - z * mpmath.eye(4), compute_uv=False)
                berr = max(berr, float(min(sv) / norm))
        eigs = tuple(mpmath.mpc(z) for z in eig)
        dists = tuple(float(abs(abs(z) - 1)) for z in eigs)
    return Spectrum(eigs, dists, berr)


def chordal_distance(z, w):
    """Distance between two points of the Riemann sphere (chordal metric)."""
    z, w = complex(z), complex(w)
    if math.isinf(abs(z)) and math.isinf(abs(w)):
        return 0.0
    if math.isinf(abs(z)):
        return 2.0 / math.sqrt(1.0 + abs(w) ** 2)
    if math.isinf(abs(w)):
        return 2.0 / math.sqrt(1.0 + abs(z) ** 2)
    return 2.0 * abs(z - w) / math.sqrt((1.0 + abs(z) ** 2) * (1.0 + abs(w) ** 2))


def match_multisets(xs, ys):
    """Greedy nearest-neighbour pairing of two equal-size multisets.

    Returns the pairs and the largest chordal distance among them.
    """
    xs, ys = list(xs), list(ys)
    if len(xs) != len(ys):
        raise ValueError("multisets differ in size")
    free = list(range(len(ys)))
    pairs = []
    worst = 0.0
    for x in xs:
        j = min(free, key=lambda k: chordal_distance(x, ys[k]))
        free.remove(j)
        d = chordal_distance(x, ys[j])
        worst = max(worst, d)
        pairs.append((x, ys[j]))
    return pairs, worst


# elementary symplectic generators


def phi_rho_shear(t, lower=True):
    """Shear of the (phi, rho) plane: rho += t*phi (lower) or phi += t*rho."""
    m = np.eye(4)
    if lower:
        m[RHO, PHI] = t
    else:
        m[PHI, RHO] = t
    return m


def su_shear(t, lower=True):
    m = np.eye(4)
    if lower:
        m[U, S] = t
    else:
        m[S, U] = t
    return m


def su_scaling(k):
    return np.diag([1.0, k, 1.0, 1.0 / k])


def su_rotation(theta):
    c, s = math.cos(theta), math.sin(theta)
    m = np.eye(4)
    m[S, S], m[S, U], m[U, S], m[U, U] = c, -s, s, c
    return m


def plane_swap():
    """Exchange the (phi, rho) and (s, u) planes, a symplectic permutation."""
    m = np.zeros((4, 4))
    m[U, PHI] = m[PHI, U] = 1.0
    m[S, RHO] = m[RHO, S] = 1.0
    return m


def transvection(v, t):
    """Symplectic transvection x -> x + t * omega(v, x) * v."""
    v = np.asarray(v, dtype=float)
    return np.eye(4) + t * np.outer(v, v @ J)


def random_symplectic(rng, n_factors=6, scale=1.0):
    """Random symplectic matrix as a product of elementary generators.

    Shears, (s, u) scalings and the plane swap alone preserve the splitting
    into the (phi, rho) and (s, u) planes, so transvections are mixed in to
    reach all of Sp(4).
    """
    m = np.eye(4)
    for _ in range(n_factors):
        kind = rng.integers(6)
        t = scale * rng.uniform(-1.0, 1.0)
        if kind == 0:
            g = phi_rho_shear(t, lower=bool(rng.integers(2)))
        elif kind == 1:
            g = su_shear(t, lower=bool(rng.integers(2)))
        elif kind == 2:
            g = su_scaling(math.exp(0.5 * t))
        elif kind == 3:
            g = plane_swap()
        else:
            g = transvection(rng.normal(size=4), t)
        m = g @ m
    return m
