"""Large-n eigenvalue laws and the one-parameter shear family.

For a strongly transverse Pi with torsion the real eigenvalues of
Pi . Df_l**n behave like

    x2 ~ d22 * lambda**-n        (dominant pair, S2 ~ -A(n))
    |x1| ~ n |nu| |Delta| / |d22|

``asymptotic_table`` measures both ratios.  Only the modulus of x1 is
compared: the sign of the x1 law is reported per run (it comes out positive,
x1 ~ +n nu Delta / d22, for every matrix tested).

For the shear family ``special_case_matrix(delta)`` the characteristic
polynomial factors exactly as

    (x**2 - (delta n nu + 2) x + 1) (x**2 - (lambda**n + lambda**-n) x + 1).
"""

from __future__ import annotations

import csv
import io
import math
import operator
from dataclasses import dataclass, field

import numpy as np

from ._numeric import to_fraction
from .config import COEFF_RTOL, get_tolerances
from .errors import FactorizationMismatch, NotStronglyTransverse, NotWithTorsion, NotYetHyperbolic
from .homoclinic import HomoclinicMatrix, special_case_matrix, transversality_report
from .linear_model import LinearModelParams, check_guard
from .spectrum import HYPERBOLIC_REAL, full_report, rel_diff, trace_coeffs, transition_matrix

__all__ = [
    "AsymptoticsRow",
    "AsymptoticsTable",
    "SpecialCaseParams",
    "asymptotic_table",
    "converging",
    "special_case_matrix",
    "special_case_factor",
    "printed_factor_residual",
    "exact_factor_residual",
    "special_case_hyperbolicity",
]

CSV_HEADER = ("n", "x1", "x2", "x1_model", "x2_model", "ratio1", "ratio2", "classification")


@dataclass(frozen=True)
class AsymptoticsRow:
    n: int
    x1: float
    x2: float
    x1_model: float
    x2_model: float
    ratio1: float
    ratio2: float
    classification: str

    @property
    def err1(self):
        """Relative error of the x1 modulus law."""
        return abs(abs(self.ratio1) - 1.0)

    @property
    def err2(self):
        return abs(abs(self.ratio2) - 1.0)


@dataclass
class AsymptoticsTable:
    rows: list = field(default_factory=list)

    @property
    def x1_sign(self):
        """Sign of x1 relative to +n nu Delta / d22 at the largest n (0 if empty)."""
        if not self.rows:
            return 0
        return int(math.copysign(1, self.rows[-1].ratio1))

    def to_csv(self, summary=True):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in self.rows:
            w.writerow([r.n, *(repr(float(x)) for x in (r.x1, r.x2, r.x1_model, r.x2_model, r.ratio1, r.ratio2)),
                        r.classification])
        if summary and self.rows:
            last = self.rows[-1]
            buf.write(f"# ratio2 at n={last.n}: {float(last.ratio2)!r}; x1 sign vs +n*nu*Delta/d22: {self.x1_sign:+d}\n")
        return buf.getvalue()


def _pair_largest(eigs, k):
    pair = eigs[2 * k: 2 * k + 2]
    return max(pair, key=lambda z: abs(z))


def asymptotic_table(h: HomoclinicMatrix, p: LinearModelParams, n_list, mode="standard") -> AsymptoticsTable:
    rep = transversality_report(h)
    if not rep.strongly_transverse:
        raise NotStronglyTransverse(
            f"asymptotic laws need a strongly transverse Pi (Delta={rep.delta!r}, d22={rep.d22!r})"
        )
    if not p.with_torsion:
        raise NotWithTorsion("asymptotic laws need torsion (nu != 0)")
    delta, d22, nu, lam = rep.delta, rep.d22, float(p.nu), float(p.lam)
    table = AsymptoticsTable()
    for n in n_list:
        n = operator.index(n)
        r = full_report(h, p, n, mode)
        if r.classification != HYPERBOLIC_REAL:
            raise NotYetHyperbolic(f"n={n} gives a {r.classification} spectrum")
        a = float(r.a_n)
        # S2: the root closest to -A(n); S1 the other one
        k2 = min((0, 1), key=lambda k: abs(complex(r.s_roots[k]) + a))
        x2 = float(complex(_pair_largest(r.eigenvalues, k2)).real)
        x1 = float(complex(_pair_largest(r.eigenvalues, 1 - k2)).real)
        x1_model = n * nu * delta / d22
        x2_model = d22 * lam**-n
        table.rows.append(AsymptoticsRow(n, x1, x2, x1_model, x2_model, x1 / x1_model, x2 / x2_model,
                                         r.classification))
    return table


def converging(errors, window=5, floor=1e-12):
    """Trend test on a sequence of law errors ordered by increasing n.

    True when the last error is at rounding level (``floor``), or when the
    least-squares slope over all samples is negative and the slope over the
    last ``window`` samples is not positive (a trend, not strict monotonicity).
    A bare first-versus-last comparison is not used: a ratio that crosses 1
    just after onset makes the first error small by coincidence.
    """
    errors = np.asarray(errors, dtype=float)
    if len(errors) < window:
        raise ValueError(f"need at least {window} samples, got {len(errors)}")
    if errors[-1] <= floor:
        return True
    slope = np.polyfit(np.arange(len(errors)), errors, 1)[0]
    tail = np.polyfit(np.arange(window), errors[-window:], 1)[0]
    return bool(slope < 0 and tail <= 0)


@dataclass(frozen=True)
class SpecialCaseParams:
    delta: float
    p: LinearModelParams
    n: int


def _expand(s1, s2):
    """Coefficients of (x^2 - s1 x + 1)(x^2 - s2 x + 1), leading first."""
    return (1.0, -(s1 + s2), 2.0 + s1 * s2, -(s1 + s2), 1.0)


def _factor_residual(sc, s2):
    h = special_case_matrix(sc.delta)
    s1 = sc.delta * sc.n * float(sc.p.nu) + 2.0
    product = _expand(s1, s2)
    q = trace_coeffs(transition_matrix(h, sc.p, sc.n))
    oracle = q.coefficients()
    return max(rel_diff(float(x), float(y)) for x, y in zip(product, oracle))


def special_case_factor(sc: SpecialCaseParams):
    """The two reciprocal quadratics of the shear family, checked against the trace oracle.

    Returns ``((1, -s1, 1), (1, -s2, 1))`` with s1 = delta n nu + 2 and
    s2 = lambda**n + lambda**-n.
    """
    check_guard(sc.p.lam, sc.n)
    lam = float(sc.p.lam)
    s1 = sc.delta * sc.n * float(sc.p.nu) + 2.0
    s2 = lam**sc.n + lam**-sc.n
    res = _factor_residual(sc, s2)
    if res > COEFF_RTOL:
        raise FactorizationMismatch(f"factor product disagrees with the trace oracle (residual {res:.3e})")
    return (1.0, -s1, 1.0), (1.0, -s2, 1.0)


def printed_factor_residual(sc: SpecialCaseParams):
    """Float oracle residual of the alternative factor lambda**(2n) + lambda**-n.

    The variant does not reproduce the characteristic polynomial, but in
    doubles the difference drops below rounding once lambda**(2n) < eps; use
    ``exact_factor_residual(sc, printed=True)`` for a test valid at every n.
    """
    check_guard(sc.p.lam, sc.n)
    lam = float(sc.p.lam)
    return _factor_residual(sc, lam ** (2 * sc.n) + lam**-sc.n)


def exact_factor_residual(sc: SpecialCaseParams, printed=False) -> float:
    """Largest relative coefficient residual of the factor product, in rational arithmetic.

    lambda, nu and delta are taken as the exact rationals of their floats.
    The correct factorization gives exactly 0; ``printed=True`` uses
    lambda**(2n) + lambda**-n as second factor, which leaves a nonzero
    residual at every n.
    """
    lam, nu, delta = to_fraction(sc.p.lam), to_fraction(sc.p.nu), to_fraction(sc.delta)
    n = sc.n
    s1 = delta * n * nu + 2
    s2 = (lam ** (2 * n) if printed else lam**n) + lam**-n
    product = (1, -(s1 + s2), 2 + s1 * s2, -(s1 + s2), 1)
    h = special_case_matrix(sc.delta)
    q = trace_coeffs(transition_matrix(h, sc.p, n, "exact"), "exact")
    worst = max(abs(x - y) / max(abs(x), abs(y), 1) for x, y in zip(product, q.coefficients()))
    return float(worst) if worst == 0 or float(worst) > 0 else math.ulp(0.0)


def special_case_hyperbolicity(sc: SpecialCaseParams, tol_hyp=None) -> bool:
    if tol_hyp is None:
        tol_hyp = get_tolerances().tol_hyp
    check_guard(sc.p.lam, sc.n)
    if sc.delta == 0 or sc.p.nu == 0:
        return False
    lam = float(sc.p.lam)
    s1 = sc.delta * sc.n * float(sc.p.nu) + 2.0
    s2 = lam**sc.n + lam**-sc.n
    return abs(s1) > 2 + tol_hyp and abs(s2) > 2 + tol_hyp
