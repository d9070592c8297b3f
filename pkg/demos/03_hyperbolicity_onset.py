"""When does Pi . Df_l**n become hyperbolic?

For strongly transverse Pi with torsion the spectrum leaves the unit circle
for all large n.  This scans a seeded ensemble and reports the onset N0, then
shows the torsionless and non-transverse cases that never get there.
"""

import numpy as np

from transtorsion import HomoclinicMatrix, LinearModelParams, max_n, special_case_matrix, strongly_transverse_ensemble
from transtorsion.spectrum import HYPERBOLIC_REAL, hyperbolic_onset


def main():
    lam = 0.8
    n_max = max_n(lam)
    rng = np.random.default_rng(0)
    onsets = []
    for h in strongly_transverse_ensemble(20, seed=0):
        nu = rng.choice([-1, 1]) * rng.uniform(0.5, 2.0)
        n0, _ = hyperbolic_onset(h, LinearModelParams(nu=nu, lam=lam), n_max)
        onsets.append(n0)
    print(f"lambda={lam}, n <= {n_max}: onsets N0 = {onsets}")

    for label, h, nu in [("shear, nu=1", special_case_matrix(1.0), 1.0),
                         ("shear, nu=0", special_case_matrix(1.0), 0.0),
                         ("identity, nu=1", HomoclinicMatrix.identity(), 1.0)]:
        _, labels = hyperbolic_onset(h, LinearModelParams(nu=nu, lam=0.5), 46)
        print(f"{label:16s} hyperbolic at {sum(x == HYPERBOLIC_REAL for x in labels)}/46 values of n")


if __name__ == "__main__":
    main()
