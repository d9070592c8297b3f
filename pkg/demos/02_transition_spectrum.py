"""Spectrum of the transition matrix Pi . Df_l**n.

The characteristic polynomial is palindromic, so it is fixed by two
coefficients A(n), B(n).  The closed form is checked against a trace oracle,
the quartic is solved through S = x + 1/x, and the roots are compared with a
dense eigensolver.  Large n needs the extended or exact precision modes.
"""

from transtorsion import (
    ConditioningExceeded,
    HomoclinicMatrix,
    LinearModelParams,
    full_report,
    special_case_matrix,
    transition_matrix,
)


def show(label, r):
    eigs = ", ".join(f"{complex(z).real:.6g}{complex(z).imag:+.3g}j" for z in r.eigenvalues)
    print(f"{label:28s} A={float(r.a_n):<12.6g} B={float(r.b_n):<12.6g} {r.classification:24s} [{eigs}]")


def main():
    p = LinearModelParams(nu=1.0, lam=0.5)
    print(transition_matrix(special_case_matrix(1.0), p, 2))
    show("shear delta=1, n=2", full_report(special_case_matrix(1.0), p, 2))
    show("identity, n=5", full_report(HomoclinicMatrix.identity(), p, 5))
    show("shear delta=1, nu=-1, n=2", full_report(special_case_matrix(1.0), LinearModelParams(nu=-1.0, lam=0.5), 2))

    r = full_report(special_case_matrix(1.0), p, 20)
    print("oracle residuals at n=20:", r.oracle_residuals)

    try:
        full_report(special_case_matrix(1.0), p, 80)
    except ConditioningExceeded as exc:
        print("n=80 in doubles:", exc)
    show("n=80, extended", full_report(special_case_matrix(1.0), p, 80, "extended"))
    show("n=200, exact", full_report(special_case_matrix(1.0), p, 200, "exact"))


if __name__ == "__main__":
    main()
