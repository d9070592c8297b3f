"""Orbits of the linear model: return times, transverse map, windows.

A passage near the torus starts in the box V+ around p+ = (phi+, s+, 0, 0)
and ends in the box V- around p- = (phi-, 0, 0, u-).  D_n is the set of
points of V+ whose n-th iterate lies in V-; the transverse map sends z in D_n
to f_l**n(z), and the homoclinic map carries V- back to V+ by

    Gamma_l(p- + z) = p+ + Pi z.

In window coordinates c, with z = mu c + p+, the composite is affine on each
set where n is constant, with linear part Pi . Df_l**n.
"""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import NotInDomain
from .homoclinic import HomoclinicMatrix
from .linear_model import LinearModelParams, apply_f_l, check_guard, max_n, orbit_point
from .symplectic import PHI, RHO, S, TWO_PI, U, Vec4, angle_diff

__all__ = [
    "GOLDEN_OMEGA",
    "WindowConfig",
    "ReturnRecord",
    "in_box",
    "in_window_box",
    "dn_membership",
    "return_times",
    "transverse_map",
    "homoclinic_map_l",
    "window_to_section",
    "section_to_window",
    "window_map_l",
    "window_affine_part",
    "itinerary",
    "search_itinerary",
    "escape_excess",
    "measured_expansion",
    "finite_difference_jacobian",
    "rotation_warning",
    "itinerary_jsonl",
    "orbit_csv",
]

#: irrational rotation per iterate, 2*pi divided by the golden ratio
GOLDEN_OMEGA = TWO_PI * (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class WindowConfig:
    p_plus: Vec4
    p_minus: Vec4
    radius: float | None = None
    mu: float | None = None

    def __post_init__(self):
        pp, pm = Vec4(*self.p_plus), Vec4(*self.p_minus)
        object.__setattr__(self, "p_plus", pp)
        object.__setattr__(self, "p_minus", pm)
        if pp.rho != 0.0 or pp.u != 0.0:
            raise ValueError("p_plus must have rho = u = 0")
        if pm.s != 0.0 or pm.rho != 0.0:
            raise ValueError("p_minus must have s = rho = 0")
        radius = self.radius
        if radius is None:
            radius = 0.1 * min(abs(pp.s), abs(pm.u))
        radius = float(radius)
        if not (radius > 0 and math.isfinite(radius)):
            raise ValueError(f"radius must be positive, got {radius!r}")
        mu = radius if self.mu is None else float(self.mu)
        if not 0 < mu <= radius:
            raise ValueError(f"mu must lie in (0, radius], got {mu!r}")
        object.__setattr__(self, "radius", radius)
        object.__setattr__(self, "mu", mu)

    def to_dict(self):
        return {"p_plus": list(self.p_plus), "p_minus": list(self.p_minus), "radius": self.radius, "mu": self.mu}

    @classmethod
    def from_dict(cls, d):
        return cls(Vec4(*d["p_plus"]), Vec4(*d["p_minus"]), d.get("radius"), d.get("mu"))


@dataclass(frozen=True)
class ReturnRecord:
    n: int
    entry_point: Vec4
    exit_point: Vec4

    def to_dict(self):
        return {"n": self.n, "entry_point": list(self.entry_point), "exit_point": list(self.exit_point)}


def in_box(center, radius, z) -> bool:
    """Closed box of half-width ``radius``; the angle uses the shortest arc."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    return (
        abs(angle_diff(z[PHI], center[PHI])) <= radius
        and abs(z[S] - center[S]) <= radius
        and abs(z[RHO] - center[RHO]) <= radius
        and abs(z[U] - center[U]) <= radius
    )


def in_window_box(c) -> bool:
    """The unit box C of window coordinates: l1 norm at most 1 in each plane."""
    return abs(c[PHI]) + abs(c[RHO]) <= 1.0 and abs(c[S]) + abs(c[U]) <= 1.0


def rotation_warning(p: LinearModelParams, max_den=10_000, tol=1e-12):
    """Warn when omega / 2 pi is rational (small denominator) within ``tol``.

    Returns the rational found, or None.
    """
    x = float(p.omega) / TWO_PI
    q = Fraction(x).limit_denominator(max_den)
    if abs(x - float(q)) <= tol:
        warnings.warn(
            f"omega / 2pi is close to {q}; phi-alignment sets may be thin", RuntimeWarning, stacklevel=2
        )
        return q
    return None


def dn_membership(w: WindowConfig, p: LinearModelParams, z, n: int) -> bool:
    """Whether z lies in V+ and f_l**n(z) in V-, using the closed-form orbit."""
    check_guard(p.lam, n)
    if not in_box(w.p_plus, w.radius, z):
        return False
    return in_box(w.p_minus, w.radius, orbit_point(p, z, n))


def _n_max(p, n_max):
    return max_n(p.lam) if n_max is None else n_max


def return_times(w: WindowConfig, p: LinearModelParams, z, n_max=None):
    """All n <= n_max with z in D_n, by scanning every n."""
    return [n for n in range(1, _n_max(p, n_max) + 1) if dn_membership(w, p, z, n)]


def _u_candidates(w, p, z, n_max):
    """Return times allowed by the u-equation alone, u * lambda**-n in [u- - r, u- + r]."""
    lo, hi = w.p_minus.u - w.radius, w.p_minus.u + w.radius
    u = z[U]
    if lo <= 0.0 <= hi or u == 0.0 or (u > 0) != (lo > 0):
        return range(1, n_max + 1)
    lo, hi = sorted((abs(lo), abs(hi)))
    k = -math.log(float(p.lam))
    n_lo = max(1, math.floor(math.log(lo / abs(u)) / k))
    n_hi = min(n_max, math.ceil(math.log(hi / abs(u)) / k))
    # one step of slack each side absorbs rounding of the logarithms
    return range(max(1, n_lo - 1), min(n_max, n_hi + 1) + 1)


def transverse_map(w: WindowConfig, p: LinearModelParams, z, n_max=None):
    """psi_l(z) = f_l**n(z) for the smallest n with z in D_n.

    Returns ``(image, n)`` and raises NotInDomain when no n <= n_max works.
    """
    n_max = _n_max(p, n_max)
    if in_box(w.p_plus, w.radius, z):
        for n in _u_candidates(w, p, z, n_max):
            if dn_membership(w, p, z, n):
                return orbit_point(p, z, n), n
    raise NotInDomain(f"no return time n <= {n_max} into V- for z = {tuple(z)}")


def homoclinic_map_l(h: HomoclinicMatrix, w: WindowConfig, z) -> Vec4:
    """Gamma_l(z) = p+ + Pi (z - p-)."""
    d = Vec4(*z) - w.p_minus
    return Vec4.from_array(w.p_plus.as_array() + h.pi @ d)


def window_to_section(w: WindowConfig, c) -> Vec4:
    """W_mu(c) = mu c + p+."""
    return Vec4.from_array(w.mu * np.asarray(c, dtype=float) + w.p_plus.as_array())


def section_to_window(w: WindowConfig, z):
    """Inverse of W_mu; the angle difference is taken along the shortest arc."""
    return (Vec4(*z) - w.p_plus) / w.mu


def window_map_l(h: HomoclinicMatrix, w: WindowConfig, p: LinearModelParams, c, n_max=None):
    """Delta_l = W_mu^-1 o Gamma_l o psi_l o W_mu on the unit box C.

    Returns ``(c_next, n)``; c_next may lie outside C.
    """
    c = np.asarray(c, dtype=float)
    if not in_window_box(c):
        raise NotInDomain(f"window coordinates {tuple(c)} lie outside the unit box")
    z, n = transverse_map(w, p, window_to_section(w, c), n_max)
    return section_to_window(w, homoclinic_map_l(h, w, z)), n


def window_affine_part(h: HomoclinicMatrix, w: WindowConfig, p: LinearModelParams, n: int):
    """Linear part Pi . Df_l**n and offset Pi (f_l**n(p+) - p-) / mu of Delta_l on D_n."""
    from .spectrum import transition_matrix

    m = transition_matrix(h, p, n)
    b = h.pi @ (orbit_point(p, w.p_plus, n) - w.p_minus) / w.mu
    return m, b


def _records(h, w, p, c, k, n_max):
    out, cs = [], [np.asarray(c, dtype=float)]
    for _ in range(k):
        try:
            c_next, n = window_map_l(h, w, p, cs[-1], n_max)
        except NotInDomain:
            break
        z = window_to_section(w, cs[-1])
        out.append(ReturnRecord(n, z, orbit_point(p, z, n)))
        cs.append(c_next)
    return out, cs


def itinerary(h: HomoclinicMatrix, w: WindowConfig, p: LinearModelParams, c, k: int, n_max=None):
    """Up to k applications of the window map; a short list means the orbit escaped."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    return _records(h, w, p, c, k, n_max)[0]


def _box_violation(center, radius, z):
    d = np.abs(Vec4(*z) - center)
    return float(max(0.0, d.max() - radius))


def escape_excess(h, w, p, c, n_max=None):
    """How far the window point c misses the domain of the window map (0 inside).

    Outside the unit box it is the l1 excess; otherwise the smallest box
    violation of f_l**n(z) against V- over the return times the u-equation allows.
    """
    c = np.asarray(c, dtype=float)
    excess = max(abs(c[PHI]) + abs(c[RHO]), abs(c[S]) + abs(c[U])) - 1.0
    if excess > 0:
        return float(excess)
    z = window_to_section(w, c)
    cands = _u_candidates(w, p, z, _n_max(p, n_max))
    return min((_box_violation(w.p_minus, w.radius, orbit_point(p, z, n)) for n in cands), default=math.inf)


def _score(h, w, p, c, k, n_max):
    records, cs = _records(h, w, p, c, k, n_max)
    if len(records) >= k:
        return records, (k, 0.0)
    return records, (len(records), -escape_excess(h, w, p, cs[-1], n_max))


def search_itinerary(h, w, p, k, seed=0, population=200, elite=20, rounds=60, n_max=None):
    """Seeded random search for an itinerary of length k.

    Cross-entropy search: starts are scored by itinerary length, ties broken
    by how narrowly the last window point misses the domain, and each round
    refits a Gaussian (full covariance) to the best ``elite`` samples.  The
    covariance lets the samples collapse onto the thin slabs where long
    itineraries live.  Returns ``(c, records)`` of the best start;
    ``itinerary(h, w, p, c, k)`` replays the records.
    """
    rng = np.random.default_rng(seed)
    mean, cov = np.zeros(4), np.eye(4) * 0.25
    best_c = np.zeros(4)
    best, best_score = _score(h, w, p, best_c, k, n_max)
    for _ in range(rounds):
        if best_score[0] >= k:
            break
        scored = []
        for c in rng.multivariate_normal(mean, cov, size=population, method="cholesky"):
            if in_window_box(c):
                rec, score = _score(h, w, p, c, k, n_max)
                scored.append((score, c, rec))
        if len(scored) < 2:
            cov *= 0.25
            continue
        scored.sort(key=lambda t: t[0], reverse=True)
        if scored[0][0] > best_score:
            best_score, best_c, best = scored[0]
        top = np.array([t[1] for t in scored[:elite]])
        mean = top.mean(axis=0)
        # keep the covariance positive definite as it collapses
        cov = np.cov(top, rowvar=False) + np.eye(4) * 1e-14 * (1.0 + np.trace(np.cov(top, rowvar=False)))
    return best_c, best


def measured_expansion(h, w, p, c, k, n_max=None):
    """Per-step growth of the u window coordinate along an itinerary.

    Ratios |du_{j+1} / du_j| of consecutive differences of the u window
    coordinates; the geometric mean of the last half of them is returned
    together with the records.  None when fewer than three window points exist.
    """
    records, cs = _records(h, w, p, c, k, n_max)
    u = np.array([x[U] for x in cs])
    du = np.diff(u)
    if len(du) < 2 or np.any(du[:-1] == 0):
        return None, records
    ratios = np.abs(du[1:] / du[:-1])
    tail = ratios[len(ratios) // 2:]
    return float(np.exp(np.mean(np.log(tail)))), records


def finite_difference_jacobian(h, w, p, c, step=1e-6, n_max=None):
    """Central-difference Jacobian of the window map at c.

    Raises NotInDomain when a probe leaves the domain and ValueError when the
    probes do not share c's return time.
    """
    c = np.asarray(c, dtype=float)
    _, n = window_map_l(h, w, p, c, n_max)
    jac = np.empty((4, 4))
    for j in range(4):
        e = np.zeros(4)
        e[j] = step
        fp, n_p = window_map_l(h, w, p, c + e, n_max)
        fm, n_m = window_map_l(h, w, p, c - e, n_max)
        if n_p != n or n_m != n:
            raise ValueError(f"return time changes near c ({n_m}, {n}, {n_p})")
        d = fp - fm
        d[PHI] = angle_diff(fp[PHI] * w.mu, fm[PHI] * w.mu) / w.mu
        jac[:, j] = d / (2 * step)
    return jac, n


def itinerary_jsonl(records):
    return "".join(json.dumps(r.to_dict()) + "\n" for r in records)


def orbit_csv(p: LinearModelParams, records):
    """Every iterate of the inner passages: columns step, phi, s, rho, u, n."""
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(("step", "phi", "s", "rho", "u", "n"))
    step = 0
    for r in records:
        z = r.entry_point
        for _ in range(r.n + 1):
            wr.writerow([step, *(repr(float(x)) for x in z), r.n])
            z = apply_f_l(p, z)
            step += 1
    return buf.getvalue()
