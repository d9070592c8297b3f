"""Symplectic building blocks and the transversality determinant.

Builds random symplectic homoclinic matrices, checks the form M^T J M = J,
and compares the determinant test for transversality with a rank test on
the stable/unstable tangent planes.
"""

import numpy as np

from transtorsion import (
    HomoclinicMatrix,
    d22_zero_witness,
    is_symplectic,
    is_transverse_rank_oracle,
    special_case_matrix,
    symplectic_ensemble,
    transversality_report,
)
from transtorsion.symplectic import J


def main():
    print("J =\n", J)

    # the shear family: identity except rho picks up delta * phi
    for delta in (0.0, 1.0, -3.0):
        h = special_case_matrix(delta)
        r = transversality_report(h)
        print(f"delta={delta:+.1f}  Delta={r.delta:+.1f}  d22={r.d22:.1f}  "
              f"transverse={r.transverse}  strongly={r.strongly_transverse}")

    # transverse but not strongly transverse
    r = transversality_report(d22_zero_witness(1.0))
    print(f"d22-zero witness: Delta={r.delta:+.1f} d22={r.d22:.1f} strongly={r.strongly_transverse}")

    # determinant and rank tests agree on a seeded random ensemble
    ens = symplectic_ensemble(500, seed=0)
    agree = sum(is_transverse_rank_oracle(h) == transversality_report(h).transverse for h in ens)
    worst = max(np.max(np.abs(h.pi.T @ J @ h.pi - J)) for h in ens)
    print(f"ensemble of {len(ens)}: rank/determinant agreement {agree}/{len(ens)}, worst |M^T J M - J| {worst:.1e}")

    bad = HomoclinicMatrix(np.diag([2.0, 1, 1, 1]), validate=False)
    print("diag(2,1,1,1) symplectic?", is_symplectic(bad.pi, 1e-8))


if __name__ == "__main__":
    main()
