"""Large-n eigenvalue laws.

The large eigenvalues of Pi . Df_l**n grow like d22 lambda**-n and like
n nu Delta / d22.  For the shear family the first law is exact; for a
generic strongly transverse Pi both ratios approach 1, the second
geometrically and the first only like 1/n.
"""

import numpy as np

from transtorsion import HomoclinicMatrix, LinearModelParams, asymptotic_table, max_n, strongly_transverse_ensemble
from transtorsion.asymptotics import converging
from transtorsion.spectrum import hyperbolic_onset


def main():
    pi = np.array([[1.0, 0, 0, 0], [0, 1, 0, 0], [2, 0, 1, 0], [0, 0, 0, 1]])
    t = asymptotic_table(HomoclinicMatrix(pi), LinearModelParams(nu=0.7, lam=0.6), range(10, 63, 13))
    print(t.to_csv(), end="")

    h = strongly_transverse_ensemble(1, seed=0)[0]
    p = LinearModelParams(nu=1.0, lam=0.8)
    n0, _ = hyperbolic_onset(h, p, max_n(p.lam))
    n_list = np.linspace(n0, max_n(p.lam), 8).round().astype(int)
    t = asymptotic_table(h, p, n_list)
    print(f"\nrandom strongly transverse Pi, onset N0={n0}")
    print(t.to_csv(), end="")
    print("x1 law converging in trend:", converging([r.err1 for r in t.rows]))


if __name__ == "__main__":
    main()
