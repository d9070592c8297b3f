"""Property suites run by ``transtorsion verify``.

Each suite returns a ``SuiteResult``.  Suites run under whatever tolerances
are active, so a broken tolerance (zero, negative, NaN) makes at least the
``config`` suite fail and usually several others.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .asymptotics import SpecialCaseParams, exact_factor_residual, special_case_factor
from .config import COEFF_RTOL, EIG_MATCH_TOL, RunConfig, Tolerances, get_tolerances
from .dynamics import (
    GOLDEN_OMEGA,
    WindowConfig,
    finite_difference_jacobian,
    return_times,
    transverse_map,
    window_affine_part,
)
from .homoclinic import (
    HomoclinicMatrix,
    d22_zero_ensemble,
    near_degenerate_cases,
    special_case_matrix,
    strongly_transverse_ensemble,
    symplectic_ensemble,
    transversality_report,
    transverse_rank_oracle_batch,
)
from .linear_model import LinearModelParams, apply_f_l, d_f_l_pow, max_n, orbit_point
from .spectrum import (
    HYPERBOLIC_COMPLEX,
    HYPERBOLIC_REAL,
    PARABOLIC,
    closed_form_coeffs,
    full_report,
    hyperbolic_onset,
    rel_diff,
    solve_palindromic,
    trace_coeffs,
    transition_matrix,
)
from .symplectic import (
    J,
    Vec4,
    dense_eigenvalues,
    is_symplectic,
    match_multisets,
    phi_rho_shear,
    plane_swap,
    random_symplectic,
    su_rotation,
    su_scaling,
    su_shear,
    transvection,
)


@dataclass
class SuiteResult:
    name: str
    passed: int = 0
    total: int = 0
    error: str = ""

    @property
    def ok(self):
        return not self.error and self.passed == self.total

    def to_dict(self):
        return asdict(self) | {"ok": self.ok}


class _Counter:
    def __init__(self, name):
        self.result = SuiteResult(name)

    def check(self, cond):
        self.result.total += 1
        if bool(cond):
            self.result.passed += 1


def suite_config(c):
    tol = get_tolerances()
    for value in asdict(tol).values():
        c.check(math.isfinite(value) and value > 0)
    cfg = RunConfig(tolerances=tol)
    c.check(RunConfig.from_dict(cfg.to_dict()) == cfg)
    c.check(RunConfig.from_dict({"precision_mode": "exact_rational"}).precision_mode == "exact")


def suite_symplectic(c):
    tol = get_tolerances().tol_spec
    for g in (phi_rho_shear(0.7), su_shear(-1.3), su_scaling(1.9), su_rotation(0.4), plane_swap(),
              transvection([0.3, -1.1, 0.5, 2.0], 0.8)):
        c.check(is_symplectic(g, tol))
    rng = np.random.default_rng(11)
    for _ in range(50):
        c.check(is_symplectic(random_symplectic(rng), tol))
    c.check(not is_symplectic(np.diag([2.0, 1.0, 1.0, 1.0]), tol))
    c.check(np.array_equal(J.T, -J))


def suite_eigen_oracle(c):
    tols = get_tolerances()
    m = transition_matrix(special_case_matrix(1.0), LinearModelParams(nu=1.0, lam=0.5), 2)
    sp = dense_eigenvalues(m)
    expected = [4.0, 0.25, 2 + math.sqrt(3), 2 - math.sqrt(3)]
    c.check(match_multisets(sp.eigenvalues, expected)[1] <= 1e-10)
    c.check(sp.backward_error <= tols.tol_eig * 1e4)
    ext = dense_eigenvalues(m, "extended")
    c.check(match_multisets(ext.eigenvalues, expected)[1] <= 1e-10)
    c.check(ext.backward_error <= tols.tol_eig)


def suite_linear_model(c):
    tol = get_tolerances().tol_spec
    c.check(max_n(0.5) == 46 and max_n(0.8) == 142 and max_n(0.3) == 26)
    p = LinearModelParams(omega=GOLDEN_OMEGA, nu=1.3, lam=0.8)
    z = Vec4(0.3, 0.2, -0.01, 1e-9)
    it = z
    for n in range(1, 60):
        it = apply_f_l(p, it)
        d = np.abs(it - orbit_point(p, z, n))
        c.check(d.max() <= 1e-10 * max(1.0, abs(it.u)))
    for n in (1, 10, 46):
        c.check(is_symplectic(d_f_l_pow(LinearModelParams(nu=2.0, lam=0.5), n), tol))


def suite_transversality(c):
    tol = get_tolerances().tol_rank
    hs = symplectic_ensemble(200, seed=3)
    pis = np.array([h.pi for h in hs])
    rank = transverse_rank_oracle_batch(pis, tol)
    for h, r in zip(hs, rank):
        c.check(transversality_report(h, tol).transverse == bool(r))
    c.check(not transversality_report(HomoclinicMatrix.identity(), tol).transverse)


def suite_coefficients(c):
    tol = get_tolerances().tol_spec
    for lam in (0.3, 0.5, 0.8):
        p = LinearModelParams(nu=0.7, lam=lam)
        for h in symplectic_ensemble(10, seed=5):
            for n in range(1, max_n(lam) + 1, 3):
                a = closed_form_coeffs(h, p, n)
                try:
                    b = trace_coeffs(transition_matrix(h, p, n), tol=tol)
                except Exception:
                    c.check(False)
                    continue
                c.check(rel_diff(a.a, b.a) <= COEFF_RTOL and rel_diff(a.b, b.b) <= COEFF_RTOL)


def suite_solver(c):
    tol_hyp = get_tolerances().tol_hyp
    p = LinearModelParams(nu=1.0, lam=0.5)
    for h in symplectic_ensemble(20, seed=8):
        for n in (1, 5, 20, 46):
            m = transition_matrix(h, p, n)
            _, eigs = solve_palindromic(trace_coeffs(m), tol_hyp)
            worst = match_multisets(eigs, dense_eigenvalues(m).eigenvalues)[1]
            if worst > EIG_MATCH_TOL:
                # LAPACK loses small eigenvalues of graded matrices; redo it at extended precision
                worst = match_multisets(eigs, dense_eigenvalues(m, "extended").eigenvalues)[1]
            c.check(worst <= EIG_MATCH_TOL)
    c.check(full_report(HomoclinicMatrix.identity(), p, 5).classification == PARABOLIC)


def suite_onset(c):
    p = LinearModelParams(nu=1.0, lam=0.8)
    for h in strongly_transverse_ensemble(8, seed=0):
        n0, _ = hyperbolic_onset(h, p, max_n(0.8), label=HYPERBOLIC_REAL)
        c.check(n0 is not None)


def suite_d22_zero(c):
    p = LinearModelParams(nu=1.0, lam=0.5)
    n = max_n(0.5)
    for sign, label in ((1.0, HYPERBOLIC_COMPLEX), (-1.0, HYPERBOLIC_REAL)):
        for h in d22_zero_ensemble(4, seed=1, delta_sign=sign):
            r = full_report(h, p, n)
            c.check(r.classification == label and r.min_unit_circle_distance > 1e-6)


def suite_shear_family(c):
    for delta in (-1.0, 0.0, 1.0):
        for nu in (-1.0, 0.0, 1.0):
            r = full_report(special_case_matrix(delta), LinearModelParams(nu=nu, lam=0.5), 40)
            if delta * nu != 0:
                c.check(r.classification == HYPERBOLIC_REAL)
            else:
                c.check(min(abs(complex(z) - 1) for z in r.eigenvalues) <= 1e-10)
    r = full_report(special_case_matrix(1.0), LinearModelParams(nu=1.0, lam=0.5), 2)
    c.check(r.a_n == -8.25 and r.b_n == 19.0)


def suite_factorization(c):
    for delta in (-3.0, -1.0, 1.0, 3.0):
        for lam in (0.3, 0.5, 0.8):
            p = LinearModelParams(nu=1.0, lam=lam)
            for n in range(1, max_n(lam) + 1, 5):
                sc = SpecialCaseParams(delta, p, n)
                try:
                    special_case_factor(sc)
                    c.check(True)
                except Exception:
                    c.check(False)
                c.check(exact_factor_residual(sc) == 0 and exact_factor_residual(sc, printed=True) > 0)


def suite_dynamics(c):
    p = LinearModelParams(omega=GOLDEN_OMEGA, nu=1.0, lam=0.5)
    n = 5
    w = WindowConfig(Vec4(0.0, 1.0, 0.0, 0.0), Vec4(n * GOLDEN_OMEGA, 0.0, 0.0, 1.0), 0.1, 0.1)
    h = special_case_matrix(1.0)
    z = Vec4(0.0, 1.0, 0.0, 0.5**n)
    img, n_found = transverse_map(w, p, z)
    c.check(n_found == n and abs(img.u - 1.0) <= 1e-12)
    c.check(return_times(w, p, z)[:1] == [n])
    m, b = window_affine_part(h, w, p, n)
    fixed = np.linalg.solve(np.eye(4) - m, b)
    for shift in (0.0, 1e-3, -2e-3):
        jac, nn = finite_difference_jacobian(h, w, p, fixed + shift)
        c.check(nn == n and np.abs(jac - m).max() <= 1e-6 * max(1.0, np.abs(m).max()))


SUITES = {
    "config": suite_config,
    "symplectic": suite_symplectic,
    "eigen_oracle": suite_eigen_oracle,
    "linear_model": suite_linear_model,
    "transversality": suite_transversality,
    "coefficients": suite_coefficients,
    "solver": suite_solver,
    "onset": suite_onset,
    "d22_zero": suite_d22_zero,
    "shear_family": suite_shear_family,
    "factorization": suite_factorization,
    "dynamics": suite_dynamics,
}


def run_suite(name, tolerances: Tolerances | None = None):
    """Run one suite under ``tolerances`` (not validated, so faults can be injected)."""
    from .config import using_tolerances

    c = _Counter(name)
    with using_tolerances(tolerances):
        try:
            SUITES[name](c)
        except Exception as exc:  # a crash is a failure of the suite, not of verify
            c.result.error = f"{type(exc).__name__}: {exc}"
    return c.result


def _run_star(args):
    return run_suite(*args)


def run_suites(names=None, tolerances=None, jobs=1):
    names = list(SUITES) if not names else list(names)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise KeyError(f"unknown suites: {', '.join(unknown)}")
    tolerances = tolerances or get_tolerances()
    if jobs <= 1:
        return [run_suite(n, tolerances) for n in names]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(_run_star, [(n, tolerances) for n in names]))
