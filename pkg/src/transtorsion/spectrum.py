"""Spectrum of the transition matrix M_n = Pi . Df_l**n.

M_n is symplectic, so its characteristic polynomial is palindromic,
``x**4 + A x**3 + B x**2 + A x + 1``.  Two independent routes produce
(A, B):

* ``closed_form_coeffs`` evaluates the explicit expressions in the entries of
  Pi, lambda**(+-n) and n*nu;
* ``trace_coeffs`` works from the numerical product matrix only.

The roots are found by the substitution S = x + 1/x, which turns the quartic
into ``S**2 + A S + (B - 2) = 0`` followed by ``x**2 - S x + 1 = 0``; a
general dense eigensolver checks the result.
"""

from __future__ import annotations

import cmath
import itertools
import operator
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from ._numeric import object_matrix, precision_context, to_fraction, to_mpf
from .config import COEFF_RTOL, EIG_MATCH_TOL, EXTENDED_PREC, get_tolerances
from .errors import NotPalindromic, OracleMismatch
from .homoclinic import HomoclinicMatrix
from .linear_model import LinearModelParams, check_guard, d_f_l_pow
from .symplectic import dense_eigenvalues, match_multisets

HYPERBOLIC_REAL = "HyperbolicReal"
HYPERBOLIC_COMPLEX = "HyperbolicComplex"
ELLIPTIC = "NonHyperbolicElliptic"
PARABOLIC = "NonHyperbolicParabolic"
MIXED = "Mixed"
CLASSIFICATIONS = (HYPERBOLIC_REAL, HYPERBOLIC_COMPLEX, ELLIPTIC, PARABOLIC, MIXED)


def is_hyperbolic(label):
    return label in (HYPERBOLIC_REAL, HYPERBOLIC_COMPLEX)


@dataclass(frozen=True)
class PalindromicQuartic:
    a: float
    b: float

    def coefficients(self):
        """Coefficients from the leading term down."""
        return (1, self.a, self.b, self.a, 1)


@dataclass(frozen=True)
class SpectrumReport:
    n: int
    a_n: float
    b_n: float
    s_roots: tuple
    eigenvalues: tuple
    classification: str
    min_unit_circle_distance: float
    oracle_residuals: dict = field(default_factory=dict)

    @property
    def hyperbolic(self):
        return is_hyperbolic(self.classification)

    def to_dict(self):
        return {
            "n": self.n,
            "A": float(self.a_n),
            "B": float(self.b_n),
            "S_roots": [_re_im(s) for s in self.s_roots],
            "eigenvalues": [_re_im(z) for z in self.eigenvalues],
            "classification": self.classification,
            "min_unit_circle_distance": float(self.min_unit_circle_distance),
            "oracle_residuals": {k: float(v) for k, v in self.oracle_residuals.items()},
        }

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)


def _re_im(z):
    z = complex(z)
    return [z.real, z.imag]


def rel_diff(x, y):
    """|x - y| / max(|x|, |y|, 1)."""
    return abs(x - y) / max(abs(x), abs(y), 1)


# transition matrix and coefficients


def transition_matrix(h: HomoclinicMatrix, p: LinearModelParams, n: int, mode="standard"):
    """Pi . Df_l**n (float array, or object array outside standard mode)."""
    dfn = d_f_l_pow(p, n, mode)
    if mode == "standard":
        return h.pi @ dfn
    conv = to_mpf if mode == "extended" else to_fraction
    with precision_context(mode):
        pi = object_matrix(h.entries("exact"), conv)
        return pi.dot(dfn)


def _closed_form(pi, lam_n, lam_mn, nnu):
    """A(n), B(n) from the block entries; ``pi`` may be batched (..., 4, 4)."""
    e = lambda i, j: pi[..., i, j]  # noqa: E731
    # basis order (phi, s, rho, u) = (0, 1, 2, 3)
    a11, a12, a21, a22 = e(0, 0), e(0, 1), e(1, 0), e(1, 1)
    b11, b12, b21, b22 = e(0, 2), e(0, 3), e(1, 2), e(1, 3)
    c11, c12, c21, c22 = e(2, 0), e(2, 1), e(3, 0), e(3, 1)
    d11, d12, d21, d22 = e(2, 2), e(2, 3), e(3, 2), e(3, 3)
    det_a = a11 * a22 - a12 * a21
    det_d = d11 * d22 - d12 * d21
    delta = c11 * d22 - d12 * c21

    a = -d22 * lam_mn - lam_n * a22 - nnu * c11 - a11 - d11
    b = (
        lam_n * (det_a + a22 * d11 - c12 * b21 + nnu * (a22 * c11 - c12 * a21))
        + lam_mn * (det_d + a11 * d22 - c21 * b12 + nnu * delta)
        + (a11 * d11 + a22 * d22 - c22 * b22 - c11 * b11)
    )
    return a, b


def closed_form_coeffs(h: HomoclinicMatrix, p: LinearModelParams, n: int, mode="standard") -> PalindromicQuartic:
    check_guard(p.lam, n, mode)
    if mode == "standard":
        lam = float(p.lam)
        a, b = _closed_form(h.pi, lam**n, lam**-n, n * float(p.nu))
        return PalindromicQuartic(float(a), float(b))
    conv = to_mpf if mode == "extended" else to_fraction
    with precision_context(mode):
        pi = object_matrix(h.entries("exact"), conv)
        lam, nu = conv(p.lam), conv(p.nu)
        lam_n = lam**n
        a, b = _closed_form(pi, lam_n, 1 / lam_n, n * nu)
    return PalindromicQuartic(a, b)


def closed_form_batch(pis, lam, nu, n):
    """Vectorised standard-mode closed form; arguments broadcast against pis[..., 0, 0]."""
    pis = np.asarray(pis, dtype=float)
    lam = np.asarray(lam, dtype=float)
    n = np.asarray(n)
    return _closed_form(pis, lam**n, lam ** (-n), n * np.asarray(nu, dtype=float))


def _minor_sums(m, sign=-1):
    """e1..e3 of a batched float matrix as sums of principal minors.

    With ``sign=+1`` every product enters with a plus sign, which gives the
    magnitude of the terms being summed (principal permanents of |m|).
    """
    e = lambda i, j: m[..., i, j]  # noqa: E731
    idx = range(4)
    e1 = sum(e(i, i) for i in idx)
    e2 = sum(e(i, i) * e(j, j) + sign * e(i, j) * e(j, i) for i in idx for j in idx if i < j)

    def minor3(i, j, k):
        return (
            e(i, i) * (e(j, j) * e(k, k) + sign * e(j, k) * e(k, j))
            + sign * e(i, j) * (e(j, i) * e(k, k) + sign * e(j, k) * e(k, i))
            + e(i, k) * (e(j, i) * e(k, j) + sign * e(j, j) * e(k, i))
        )

    e3 = minor3(1, 2, 3) + minor3(0, 2, 3) + minor3(0, 1, 3) + minor3(0, 1, 2)
    return e1, e2, e3


def charpoly_minors(m):
    """Elementary symmetric functions e1..e4 of the eigenvalues by principal minors.

    Works on float arrays of shape (..., 4, 4).  ``e2`` equals
    ``(tr(M)**2 - tr(M**2)) / 2`` but is summed as 2x2 principal minors, which
    avoids cancelling two terms of size lambda**-2n when the result is only
    of size lambda**-n.
    """
    m = np.asarray(m, dtype=float)
    e1, e2, e3 = _minor_sums(m)
    return e1, e2, e3, np.linalg.det(m)


def charpoly_scales(m):
    """Magnitudes of the terms summed into e3 and e4 (permanents of |m|).

    Rounding in m perturbs e3 and e4 by about eps times these values, so the
    palindromic check is made relative to them.
    """
    am = np.abs(np.asarray(m, dtype=float))
    _, _, s3 = _minor_sums(am, sign=1)
    s4 = sum(
        am[..., 0, a] * am[..., 1, b] * am[..., 2, c] * am[..., 3, d]
        for a, b, c, d in itertools.permutations(range(4))
    )
    return s3, s4


def charpoly_power_sums(m):
    """e1..e4 from traces of powers by the Newton identities (object arrays).

    Used with exact rationals or with mpmath numbers at boosted precision.
    """
    m2 = m.dot(m)
    m3 = m2.dot(m)
    m4 = m2.dot(m2)
    p1, p2, p3, p4 = (sum(x[i, i] for i in range(4)) for x in (m, m2, m3, m4))
    e1 = p1
    e2 = (e1 * p1 - p2) / 2
    e3 = (e2 * p1 - e1 * p2 + p3) / 3
    e4 = (e3 * p1 - e2 * p2 + e1 * p3 - p4) / 4
    return e1, e2, e3, e4


def charpoly(m, mode="standard"):
    """(e1, e2, e3, e4): char. polynomial is x^4 - e1 x^3 + e2 x^2 - e3 x + e4."""
    if mode == "standard":
        return tuple(float(x) for x in charpoly_minors(m))
    if mode == "exact":
        return charpoly_power_sums(object_matrix(m, to_fraction))
    mags = [abs(x) for x in np.asarray(m, dtype=object).flat if x != 0]
    extra = 4 * max(0, int(mpmath.log(max(mags), 2)) + 1) + 64 if mags else 64
    with precision_context("extended", extra_bits=extra):
        e = charpoly_power_sums(object_matrix(m, to_mpf))
    with precision_context("extended"):
        return tuple(+x for x in e)


def trace_coeffs(m, mode="standard", tol=None) -> PalindromicQuartic:
    """A = -tr M and B = (tr(M)**2 - tr(M**2)) / 2 from the matrix alone.

    Also checks that the polynomial is palindromic (e3 == e1, e4 == 1), each
    to ``tol`` relative to the size of the terms that make it up, and raises
    NotPalindromic otherwise.
    """
    if tol is None:
        tol = get_tolerances().tol_spec
    e1, e2, e3, e4 = charpoly(m, mode)
    s3, s4 = charpoly_scales(np.asarray(m, dtype=float))
    ok = abs(e3 - e1) <= tol * max(1.0, abs(float(e1)), float(s3)) and abs(e4 - 1) <= tol * max(1.0, float(s4))
    if not ok:
        raise NotPalindromic(
            f"characteristic polynomial is not palindromic: e1={float(e1):.17g}, e3={float(e3):.17g}, "
            f"det={float(e4):.17g}"
        )
    with precision_context(mode):
        return PalindromicQuartic(-e1, e2)


# S-reduction solver


def _is_mp(x):
    return isinstance(x, (mpmath.mpf, mpmath.mpc))


def _sqrt(x):
    if _is_mp(x):
        return mpmath.sqrt(x)
    return cmath.sqrt(x) if isinstance(x, complex) or x < 0 else math.sqrt(x)


def _sign(x):
    return -1 if x < 0 else 1


def _reciprocal_pair(s):
    """Roots of x**2 - s x + 1, larger modulus first, product exactly 1/x * x."""
    if isinstance(s, complex) or isinstance(s, mpmath.mpc):
        w = _sqrt((s - 2) * (s + 2))
        big = (s + w) / 2 if abs(s + w) >= abs(s - w) else (s - w) / 2
        return big, 1 / big
    if abs(s) > 2:
        big = (s + _sign(s) * _sqrt((s - 2) * (s + 2))) / 2
        return big, 1 / big
    if abs(s) == 2:
        return s / 2, s / 2
    # elliptic: conjugate pair on the unit circle
    im = _sqrt((2 - s) * (2 + s)) / 2
    one = mpmath.mpc(s / 2, im) if _is_mp(s) else complex(s / 2, im)
    return one, one.conjugate()


def _snap(s, tol_hyp):
    """Round S onto +-2 when it is within tol_hyp**2 (eigenvalue within tol_hyp of +-1)."""
    if isinstance(s, (complex, mpmath.mpc)):
        return s
    for target in (2, -2):
        if abs(s - target) <= tol_hyp**2:
            return mpmath.mpf(target) if _is_mp(s) else float(target)
    return s


def s_roots(q: PalindromicQuartic):
    """Roots of S**2 + A S + (B - 2) = 0, dominant root first."""
    a, c = q.a, q.b - 2
    disc = a * a - 4 * c
    if disc >= 0:
        big = -(a + _sign(a) * _sqrt(disc)) / 2
        small = c / big if big != 0 else big
        return big, small
    w = _sqrt(-disc) / 2
    re = -a / 2
    if _is_mp(re):
        return mpmath.mpc(re, w), mpmath.mpc(re, -w)
    return complex(re, w), complex(re, -w)


def solve_palindromic(q: PalindromicQuartic, tol_hyp=None):
    """S-roots and the four eigenvalues of the palindromic quartic ``q``.

    Returns ``(s_roots, eigenvalues)`` with eigenvalues ordered as
    (x_big(S_0), 1/x_big(S_0), x_big(S_1), 1/x_big(S_1)).  Exact Fraction
    input is solved with mpmath at a precision sized to the coefficients.
    """
    if tol_hyp is None:
        tol_hyp = get_tolerances().tol_hyp
    if isinstance(q.a, Fraction) or isinstance(q.b, Fraction):
        bits = max(abs(q.a), abs(q.b), 1).numerator.bit_length()
        with mpmath.workprec(EXTENDED_PREC + 2 * bits):
            return _solve(PalindromicQuartic(to_mpf(q.a), to_mpf(q.b)), tol_hyp)
    if _is_mp(q.a) or _is_mp(q.b):
        with precision_context("extended"):
            return _solve(q, tol_hyp)
    return _solve(PalindromicQuartic(float(q.a), float(q.b)), tol_hyp)


def _solve(q, tol_hyp):
    roots = tuple(_snap(s, tol_hyp) for s in s_roots(q))
    eigs = []
    for s in roots:
        eigs.extend(_reciprocal_pair(s))
    return roots, tuple(eigs)


# classification


def _is_real(z, tol):
    # relative to |z|: the small member of a reciprocal pair is as real as the big one
    return float(abs(z.imag)) <= tol * float(abs(z)) if hasattr(z, "imag") else True


def classify(eigenvalues, tol_hyp=None, tol_real=None):
    """Label the spectrum relative to the unit circle.

    Hyperbolic labels are used exactly when every eigenvalue is farther than
    ``tol_hyp`` from the unit circle.
    """
    tols = get_tolerances()
    tol_hyp = tols.tol_hyp if tol_hyp is None else tol_hyp
    tol_real = tols.tol_spec if tol_real is None else tol_real
    dist = [float(abs(abs(z) - 1)) for z in eigenvalues]
    real = [_is_real(z, tol_real) for z in eigenvalues]
    if min(dist) > tol_hyp:
        if all(real):
            return HYPERBOLIC_REAL
        if not any(real):
            return HYPERBOLIC_COMPLEX
        return MIXED
    if any(float(abs(z - 1)) <= tol_hyp or float(abs(z + 1)) <= tol_hyp for z in eigenvalues):
        return PARABOLIC
    if any(d <= tol_hyp and not r for d, r in zip(dist, real)):
        return ELLIPTIC
    return MIXED


def full_report(h: HomoclinicMatrix, p: LinearModelParams, n: int, mode="standard") -> SpectrumReport:
    """Closed form, trace oracle, S-reduction, dense oracle and classification.

    Raises OracleMismatch when the two coefficient routes or the two
    eigenvalue routes disagree.
    """
    tols = get_tolerances()
    n = operator.index(n)
    check_guard(p.lam, n, mode)
    m = transition_matrix(h, p, n, mode)
    dense = dense_eigenvalues(m, "standard" if mode == "standard" else "extended")

    if not h.symplectic:
        # no palindromic shortcut for a non-symplectic Pi
        e1, e2, _, _ = charpoly(m, mode)
        eigs = dense.eigenvalues
        return SpectrumReport(
            n=n,
            a_n=-e1,
            b_n=e2,
            s_roots=(),
            eigenvalues=eigs,
            classification=classify(eigs),
            min_unit_circle_distance=dense.min_unit_circle_distance,
            oracle_residuals={"dense_backward_error": dense.backward_error},
        )

    closed = closed_form_coeffs(h, p, n, mode)
    traced = trace_coeffs(m, mode)
    coeff_res = max(rel_diff(closed.a, traced.a), rel_diff(closed.b, traced.b))
    if coeff_res > COEFF_RTOL:
        raise OracleMismatch(
            f"closed-form (A, B) = ({float(closed.a)!r}, {float(closed.b)!r}) disagrees with trace oracle "
            f"({float(traced.a)!r}, {float(traced.b)!r}) at n={n}: relative residual {float(coeff_res):.3e}"
        )
    roots, eigs = solve_palindromic(closed, tols.tol_hyp)
    _, eig_res = match_multisets(eigs, dense.eigenvalues)
    escalated = False
    if eig_res > EIG_MATCH_TOL and mode == "standard":
        # double-precision eigensolvers lose eps*||M|| absolutely on graded
        # matrices; redo the same float matrix at extended precision
        dense = dense_eigenvalues(m, "extended")
        _, eig_res = match_multisets(eigs, dense.eigenvalues)
        escalated = True
    if eig_res > EIG_MATCH_TOL:
        raise OracleMismatch(
            f"palindromic eigenvalues disagree with dense eigenvalues at n={n}: chordal residual {eig_res:.3e}"
        )
    dist = [float(abs(abs(z) - 1)) for z in eigs]
    return SpectrumReport(
        n=n,
        a_n=closed.a,
        b_n=closed.b,
        s_roots=roots,
        eigenvalues=eigs,
        classification=classify(eigs),
        min_unit_circle_distance=min(dist),
        oracle_residuals={
            "coefficients": float(coeff_res),
            "eigenvalues": float(eig_res),
            "dense_backward_error": float(dense.backward_error),
            "dense_escalated": float(escalated),
        },
    )


def hyperbolic_onset(h, p, n_max, mode="standard", label=HYPERBOLIC_REAL):
    """Linear scan over n = 1..n_max.

    Returns ``(n0, labels)`` where n0 is the smallest n from which every
    sampled n up to n_max carries ``label`` (None if the last one does not).
    """
    labels = [full_report(h, p, n, mode).classification for n in range(1, n_max + 1)]
    n0 = None
    for n in range(n_max, 0, -1):
        if labels[n - 1] != label:
            break
        n0 = n
    return n0, labels
