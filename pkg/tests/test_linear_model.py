from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from transtorsion.errors import ConditioningExceeded
from transtorsion.linear_model import (
    LinearModelParams,
    apply_f_l,
    check_guard,
    d_f_l,
    d_f_l_pow,
    guard_limit,
    max_n,
    orbit_point,
)
from transtorsion.spectrum import classify
from transtorsion.symplectic import Vec4, dense_eigenvalues, is_symplectic


def test_params_validation():
    with pytest.raises(ValueError):
        LinearModelParams(lam=1.0)
    with pytest.raises(ValueError):
        LinearModelParams(lam=0.0)
    with pytest.raises(ValueError):
        LinearModelParams(nu=float("nan"))
    assert LinearModelParams(nu=0.0).with_torsion is False
    assert LinearModelParams(nu=1e-300).with_torsion is True


def test_apply_f_l_examples():
    assert tuple(apply_f_l(LinearModelParams(omega=0, nu=1, lam=0.5), Vec4(0, 1, 0, 1))) == (0, 0.5, 0, 2)
    z = apply_f_l(LinearModelParams(omega=0.1, nu=2, lam=0.5), Vec4(0, 0, 0.3, 0))
    assert z.phi == pytest.approx(0.7) and z.rho == 0.3
    assert tuple(apply_f_l(LinearModelParams(omega=0.0), Vec4(1.3, 0, 0, 0))) == (1.3, 0, 0, 0)


def test_d_f_l_examples():
    assert np.array_equal(d_f_l(LinearModelParams(nu=0, lam=0.5)), np.diag([1, 0.5, 1, 2]))
    m = d_f_l(LinearModelParams(nu=1, lam=0.5))
    assert np.array_equal(m, [[1, 0, 1, 0], [0, 0.5, 0, 0], [0, 0, 1, 0], [0, 0, 0, 2]])
    assert is_symplectic(m, 1e-12)


def test_d_f_l_pow_examples():
    p = LinearModelParams(nu=1, lam=0.5)
    assert np.array_equal(d_f_l_pow(p, 1), d_f_l(p))
    m = d_f_l_pow(p, 2)
    assert (m[0, 2], m[1, 1], m[3, 3]) == (2, 0.25, 4)
    assert np.array_equal(d_f_l_pow(LinearModelParams(nu=0, lam=0.5), 10), np.diag([1, 2.0**-10, 1, 2.0**10]))


def test_guard_values():
    assert guard_limit() == 2**46
    assert (max_n(0.5), max_n(0.8), max_n(0.3)) == (46, 142, 26)
    assert max_n(0.5, "extended") == 121
    assert max_n(0.5, "exact") is None
    check_guard(0.5, 46)
    with pytest.raises(ConditioningExceeded) as exc:
        check_guard(0.5, 47)
    assert exc.value.required_mode == "extended" and "--precision extended" in str(exc.value)
    with pytest.raises(ConditioningExceeded) as exc:
        check_guard(0.5, 200)
    assert exc.value.required_mode == "exact"
    with pytest.raises(ValueError):
        check_guard(0.5, 0)


def test_extended_and_exact_powers():
    p = LinearModelParams(nu=0.5, lam=0.5)
    ext = d_f_l_pow(p, 100, "extended")
    assert float(ext[3, 3]) == 2.0**100
    ex = d_f_l_pow(p, 300, "exact")
    assert ex[3, 3] == Fraction(2) ** 300 and ex[0, 2] == 150
    assert is_symplectic(ex, 0)
    with pytest.raises(ConditioningExceeded):
        d_f_l_pow(p, 200, "extended")


def test_d_f_l_pow_spectrum_never_hyperbolic():
    for n in (1, 7, 46):
        sp = dense_eigenvalues(d_f_l_pow(LinearModelParams(nu=1.3, lam=0.5), n))
        assert classify(sp.eigenvalues).startswith("NonHyperbolic")


@given(st.floats(0.05, 0.95), st.floats(-3, 3), st.integers(1, 200))
@settings(max_examples=150, deadline=None)
def test_power_matches_repeated_product(lam, nu, n):
    p = LinearModelParams(nu=nu, lam=lam)
    if n > max_n(lam):
        return
    m = np.eye(4)
    d = d_f_l(p)
    for _ in range(n):
        m = m @ d
    closed = d_f_l_pow(p, n)
    assert np.all(np.abs(m - closed) <= 1e-10 * np.maximum(1, np.abs(closed)))
    assert is_symplectic(closed, 1e-9)


@given(st.floats(0.1, 0.9), st.floats(-2, 2), st.floats(0, 6), st.integers(1, 40),
       st.tuples(*[st.floats(-1, 1)] * 4))
@settings(max_examples=150, deadline=None)
def test_closed_form_orbit_matches_iteration(lam, nu, omega, n, z):
    p = LinearModelParams(omega=omega, nu=nu, lam=lam)
    if n > max_n(lam):
        return
    z0 = Vec4(*z)
    it = z0
    for _ in range(n):
        it = apply_f_l(p, it)
    closed = orbit_point(p, z0, n)
    d = np.abs(it - closed)
    assert d[0] <= 1e-10 * n and d[1] <= 1e-10 and d[2] <= 1e-10 and d[3] <= 1e-10 * max(1, abs(closed.u))
    # affine form built from the power matrix
    affine = d_f_l_pow(p, n) @ z0.as_array()
    affine[0] += n * omega
    assert abs((Vec4.from_array(affine) - closed)[0]) <= 1e-9 * n
