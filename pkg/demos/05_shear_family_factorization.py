"""The shear family factors exactly.

For Pi = identity plus delta in the (rho, phi) slot the characteristic
polynomial splits as (x^2 - (delta n nu + 2) x + 1)(x^2 - (lambda**n + lambda**-n) x + 1).
Replacing the second trace by lambda**(2n) + lambda**-n breaks the identity;
in doubles that is invisible once lambda**(2n) underflows relative to
lambda**-n, so the comparison is done in rational arithmetic.
"""

from transtorsion import LinearModelParams, SpecialCaseParams, special_case_factor, special_case_hyperbolicity
from transtorsion.asymptotics import exact_factor_residual, printed_factor_residual


def main():
    p = LinearModelParams(nu=1.0, lam=0.5)
    print("n=2 factors:", special_case_factor(SpecialCaseParams(1.0, p, 2)))
    print(f"{'n':>3} {'exact':>8} {'variant exact':>14} {'variant float':>14}")
    for n in (1, 2, 5, 10, 20, 30, 46):
        sc = SpecialCaseParams(1.0, p, n)
        print(f"{n:3d} {exact_factor_residual(sc):8.1e} {exact_factor_residual(sc, printed=True):14.1e} "
              f"{printed_factor_residual(sc):14.1e}")

    q = LinearModelParams(nu=-1.0, lam=0.5)
    flags = [special_case_hyperbolicity(SpecialCaseParams(1.0, q, n)) for n in range(1, 9)]
    print("delta=1, nu=-1, hyperbolic for n=1..8:", flags)


if __name__ == "__main__":
    main()
