"""Scalar conversions between float, Fraction and mpmath types."""

from contextlib import nullcontext
from fractions import Fraction

import mpmath
import numpy as np


def to_mpf(x):
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    if isinstance(x, (int, np.integer)):
        return mpmath.mpf(int(x))
    return mpmath.mpf(x)


def to_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    return Fraction(float(x))


def object_matrix(m, conv):
    """Convert a 4x4 array-like into an object ndarray via ``conv``."""
    rows = m.tolist() if hasattr(m, "tolist") else m
    out = np.empty((4, 4), dtype=object)
    for i in range(4):
        for j in range(4):
            out[i, j] = conv(rows[i][j])
    return out


def precision_context(mode, extra_bits=0):
    """mpmath working precision for the extended mode; no-op otherwise."""
    if mode == "extended":
        from .config import EXTENDED_PREC

        return mpmath.workprec(EXTENDED_PREC + 32 + extra_bits)
    return nullcontext()
