"""Linear part of the Poincare map near the torus (three degrees of freedom).

    f_l(phi, s, rho, u) = (phi + omega + nu*rho, lambda*s, rho, u/lambda)
"""

from __future__ import annotations

import math
import operator
from dataclasses import dataclass

import numpy as np

from ._numeric import object_matrix, precision_context, to_fraction, to_mpf
from .config import EXTENDED_PREC
from .errors import ConditioningExceeded
from .symplectic import PHI, RHO, S, U, Vec4

#: lambda**-n must stay below 2**(p - 1) / 64 for a p-bit significand
GUARD_MARGIN_BITS = 6
_SIGNIFICAND_BITS = {"standard": 53, "extended": EXTENDED_PREC}


@dataclass(frozen=True)
class LinearModelParams:
    omega: float = 0.0
    nu: float = 1.0
    lam: float = 0.5

    def __post_init__(self):
        if not 0 < self.lam < 1:
            raise ValueError(f"lambda must lie in (0, 1), got {self.lam!r}")
        if isinstance(self.nu, float) and not math.isfinite(self.nu):
            raise ValueError("nu must be finite")

    @property
    def with_torsion(self):
        # exact test: nu is a model parameter, not a measurement
        return self.nu != 0


def guard_limit(mode="standard"):
    """Largest admissible lambda**-n for a precision mode (None: unbounded)."""
    if mode == "exact":
        return None
    bits = _SIGNIFICAND_BITS[mode]
    return 2 ** (bits - 1 - GUARD_MARGIN_BITS)


def max_n(lam, mode="standard"):
    """Largest n passing the overflow guard; None in exact mode."""
    limit = guard_limit(mode)
    if limit is None:
        return None
    inv = 1 / to_fraction(lam)
    n = int(math.floor(math.log(limit) / math.log(float(inv))))
    # correct the float estimate with an exact comparison
    while n > 0 and inv**n > limit:
        n -= 1
    while inv ** (n + 1) <= limit:
        n += 1
    return n


def check_guard(lam, n, mode="standard"):
    n = operator.index(n)
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    limit = guard_limit(mode)
    if limit is None:
        return
    if (1 / to_fraction(lam)) ** n > limit:
        needed = "extended" if mode == "standard" and n <= max_n(lam, "extended") else "exact"
        raise ConditioningExceeded(
            f"lambda**-n = {float(lam) ** -n:.3e} exceeds the {mode} precision budget "
            f"2**{int(math.log2(limit))} (n <= {max_n(lam, mode)}); use --precision {needed}",
            required_mode=needed,
        )


def apply_f_l(p: LinearModelParams, z) -> Vec4:
    phi, s, rho, u = z
    lam = float(p.lam)
    return Vec4(phi + float(p.omega) + float(p.nu) * rho, lam * s, rho, u / lam)


def orbit_point(p: LinearModelParams, z, n: int) -> Vec4:
    """n-th iterate of f_l in closed form."""
    phi, s, rho, u = z
    lam = float(p.lam)
    return Vec4(phi + n * (float(p.omega) + float(p.nu) * rho), lam**n * s, rho, u * lam**-n)


def d_f_l(p: LinearModelParams):
    m = np.eye(4)
    m[PHI, RHO] = float(p.nu)
    m[S, S] = float(p.lam)
    m[U, U] = 1.0 / float(p.lam)
    return m


def d_f_l_pow(p: LinearModelParams, n: int, mode="standard"):
    """Df_l**n in closed form; object arrays (mpf or Fraction) outside standard mode."""
    check_guard(p.lam, n, mode)
    n = operator.index(n)
    if mode == "standard":
        lam = float(p.lam)
        m = np.eye(4)
        m[PHI, RHO] = n * float(p.nu)
        m[S, S] = lam**n
        m[U, U] = lam**-n
        return m
    conv = to_mpf if mode == "extended" else to_fraction
    with precision_context(mode):
        lam, nu = conv(p.lam), conv(p.nu)
        m = object_matrix(np.eye(4), conv)
        m[PHI, RHO] = n * nu
        m[S, S] = lam**n
        m[U, U] = 1 / lam**n
    return m
