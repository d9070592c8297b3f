"""The homoclinic matrix and its transversality conditions.

In the basis (e_phi, e_s, e_rho, e_u) the homoclinic matrix splits into 2x2
blocks ``[[A, B], [C, D]]``: rows and columns {phi, s} against {rho, u}.
Entries are addressed as ``h.c11``, ``h.d22`` and so on (1-based, as in the
block notation).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from ._numeric import object_matrix, to_fraction
from .config import get_tolerances
from .errors import NonFinite, NonSymplectic
from .symplectic import (
    PHI,
    RHO,
    S,
    U,
    J,
    is_symplectic,
    phi_rho_shear,
    plane_swap,
    random_symplectic,
    transvection,
)

_ENTRY = re.compile(r"^([abcd])([12])([12])$")
_BLOCK_OFFSETS = {"a": (0, 0), "b": (0, 2), "c": (2, 0), "d": (2, 2)}
# block index 1/2 -> basis index, rows {phi, s} or {rho, u}
_ROWS = {0: (PHI, S), 2: (RHO, U)}


@dataclass(frozen=True, eq=False)
class HomoclinicMatrix:
    """Homoclinic matrix Pi, validated symplectic unless ``validate=False``.

    ``exact`` optionally keeps the entries as Fractions for the exact mode;
    ``pi`` is always the float matrix.
    """

    pi: np.ndarray
    exact: np.ndarray | None = None
    validate: bool = True
    symplectic: bool = field(init=False)

    def __post_init__(self):
        pi = np.array(self.pi, dtype=float)
        if pi.shape != (4, 4):
            raise ValueError(f"homoclinic matrix must be 4x4, got {pi.shape}")
        if not np.all(np.isfinite(pi)):
            raise NonFinite("homoclinic matrix has non-finite entries")
        pi.setflags(write=False)
        object.__setattr__(self, "pi", pi)
        if self.exact is not None:
            ex = object_matrix(self.exact, to_fraction)
            object.__setattr__(self, "exact", ex)
            ok = is_symplectic(ex, 0)
        else:
            ok = is_symplectic(pi, get_tolerances().tol_spec)
        object.__setattr__(self, "symplectic", ok)
        if self.validate and not ok:
            raise NonSymplectic("homoclinic matrix is not symplectic (pass validate=False to bypass)")

    def __getattr__(self, name):
        m = _ENTRY.match(name)
        if m is None:
            raise AttributeError(name)
        r0, c0 = _BLOCK_OFFSETS[m.group(1)]
        return float(self.pi[_ROWS[r0][int(m.group(2)) - 1], _ROWS[c0][int(m.group(3)) - 1]])

    def block(self, name):
        r0, c0 = _BLOCK_OFFSETS[name.lower()]
        return self.pi[np.ix_(_ROWS[r0], _ROWS[c0])]

    @property
    def A(self):
        return self.block("a")

    @property
    def B(self):
        return self.block("b")

    @property
    def C(self):
        return self.block("c")

    @property
    def D(self):
        return self.block("d")

    def entries(self, mode="standard"):
        """Entries as floats, or as an object array of Fractions in exact mode."""
        if mode == "exact":
            return self.exact if self.exact is not None else object_matrix(self.pi, to_fraction)
        return self.pi

    @classmethod
    def identity(cls):
        return cls(np.eye(4))

    @classmethod
    def from_text(cls, text, exact=False, validate=True):
        """Parse 16 whitespace separated reals, row-major in (phi, s, rho, u)."""
        tokens = text.split()
        if len(tokens) != 16:
            raise ValueError(f"expected 16 reals, got {len(tokens)}")
        values = np.array([float(t) for t in tokens]).reshape(4, 4)
        ex = np.array([to_fraction(t) for t in tokens], dtype=object).reshape(4, 4) if exact else None
        return cls(values, exact=ex, validate=validate)

    @classmethod
    def from_file(cls, path, exact=False, validate=True):
        with open(path, encoding="utf-8") as fh:
            return cls.from_text(fh.read(), exact=exact, validate=validate)

    def to_text(self):
        return "\n".join(" ".join(repr(float(x)) for x in row) for row in self.pi) + "\n"


@dataclass(frozen=True)
class TransversalityReport:
    delta: float
    transverse: bool
    strongly_transverse: bool
    d22: float


def transversality_delta(h: HomoclinicMatrix) -> float:
    """det [[c11, d12], [c21, d22]]."""
    return h.c11 * h.d22 - h.d12 * h.c21


def is_transverse_rank_oracle(h: HomoclinicMatrix, tol=None) -> bool:
    """Numerical rank test of Pi(T W^-) + T W^+ = T S.

    T W^- at p^- is span{e_phi, e_u}; T W^+ at p^+ is span{e_phi, e_s}.
    """
    if tol is None:
        tol = get_tolerances().tol_rank
    return bool(transverse_rank_oracle_batch(h.pi[None], tol)[0])


def transverse_rank_oracle_batch(pis, tol=None):
    if tol is None:
        tol = get_tolerances().tol_rank
    pis = np.asarray(pis, dtype=float)
    cols = np.zeros(pis.shape[:-2] + (4, 4))
    cols[..., :, 0] = pis[..., :, PHI]
    cols[..., :, 1] = pis[..., :, U]
    cols[..., PHI, 2] = 1.0
    cols[..., S, 3] = 1.0
    sv = np.linalg.svd(cols, compute_uv=False)
    return sv[..., -1] > tol * sv[..., 0]


def transversality_report(h: HomoclinicMatrix, tol=None) -> TransversalityReport:
    if tol is None:
        tol = get_tolerances().tol_rank
    delta = transversality_delta(h)
    transverse = abs(delta) > tol
    return TransversalityReport(
        delta=delta,
        transverse=transverse,
        strongly_transverse=transverse and abs(h.d22) > tol,
        d22=h.d22,
    )


def fenichel_leaf_test(h: HomoclinicMatrix) -> bool:
    """Whether the image of the unstable fibre direction e_u crosses {u = 0}.

    The u-component of Pi e_u is d22, so the test is exact on the stored entry.
    """
    return h.d22 != 0.0


# constructors and seeded ensembles


def special_case_matrix(delta) -> HomoclinicMatrix:
    """Identity except for the (rho, phi) entry, equal to ``delta``."""
    ex = object_matrix(np.eye(4), to_fraction)
    ex[RHO, PHI] = to_fraction(delta)
    return HomoclinicMatrix(phi_rho_shear(float(delta)), exact=ex)


def d22_zero_witness(delta=1.0) -> HomoclinicMatrix:
    """A symplectic Pi with d22 = 0 and transversality determinant ``delta``.

    Built as a (phi, rho) shear after the plane swap: the swap sends e_u to
    e_phi and e_phi to e_u, so d22 = 0 and c21 = 1; the shear puts -delta in d12.
    """
    pi = phi_rho_shear(-float(delta)) @ plane_swap()
    ex = object_matrix(pi, to_fraction)
    ex[RHO, U] = -to_fraction(delta)
    return HomoclinicMatrix(pi, exact=ex)


def _rng(seed_or_rng):
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return np.random.default_rng(seed_or_rng)


def symplectic_ensemble(count, seed=0, n_factors=6, scale=1.0, max_entry=10.0):
    """Seeded list of random symplectic homoclinic matrices."""
    rng = _rng(seed)
    out = []
    while len(out) < count:
        m = random_symplectic(rng, n_factors=n_factors, scale=scale)
        if np.abs(m).max() <= max_entry:
            out.append(HomoclinicMatrix(m))
    return out


def strongly_transverse_ensemble(count, seed=0, min_delta=0.25, min_d22=0.25, max_entry=4.0):
    """Seeded random symplectic matrices with |Delta| and |d22| bounded below."""
    rng = _rng(seed)
    out = []
    while len(out) < count:
        m = random_symplectic(rng)
        if np.abs(m).max() > max_entry:
            continue
        h = HomoclinicMatrix(m)
        if abs(transversality_delta(h)) >= min_delta and abs(h.d22) >= min_d22:
            out.append(h)
    return out


def d22_zero_ensemble(count, seed=0, delta_sign=1.0, min_delta=0.25, max_entry=4.0, n_factors=3):
    """Seeded symplectic matrices with d22 = 0 exactly and sign(Delta) = delta_sign.

    Each is ``L @ d22_zero_witness(1) @ R``: transvections along vectors with
    no u-component leave the u-row of the witness untouched on the left, and
    with no s-component leave its u-column untouched on the right, so the
    zero (u, u) entry survives without rounding.
    """
    rng = _rng(seed)
    base = d22_zero_witness(1.0).pi
    out = []
    while len(out) < count:
        m = base.copy()
        for _ in range(n_factors):
            v = rng.normal(size=4)
            v[U] = 0.0
            m = transvection(v, rng.uniform(-1.0, 1.0)) @ m
            w = rng.normal(size=4)
            w[S] = 0.0
            m = m @ transvection(w, rng.uniform(-1.0, 1.0))
        if np.abs(m).max() > max_entry:
            continue
        h = HomoclinicMatrix(m)
        d = transversality_delta(h)
        if abs(d) >= min_delta and np.sign(d) == np.sign(delta_sign):
            out.append(h)
    return out


def near_degenerate_cases():
    """Ten hand-built symplectic matrices with |Delta| in [1e-12, 1e-6]."""
    cases = [special_case_matrix(10.0**-k) for k in range(6, 13)]
    cases += [d22_zero_witness(d) for d in (3e-12, 3e-9, 3e-7)]
    return cases
