"""Orbits through the homoclinic window.

Points near p+ are carried by the linear flow past the saddle to V-, then
back to V+ by Pi.  In window coordinates this is an affine map on each
return-time set D_n.  A seeded search finds starts whose orbits return
several times; the per-step growth of u along such an orbit matches the
dominant eigenvalue of Pi . Df_l**n.
"""

import numpy as np

from transtorsion import LinearModelParams, Vec4, full_report, special_case_matrix
from transtorsion.dynamics import (
    GOLDEN_OMEGA,
    WindowConfig,
    finite_difference_jacobian,
    itinerary,
    measured_expansion,
    search_itinerary,
)


def main():
    n = 5
    h = special_case_matrix(1.0)
    p = LinearModelParams(omega=GOLDEN_OMEGA, nu=1.0, lam=0.5)
    # p- sits where the flow carries p+ after n steps, so D_n is nonempty
    w = WindowConfig(Vec4(0, 1, 0, 0), Vec4(n * GOLDEN_OMEGA, 0, 0, 1), radius=0.1)

    c, records = search_itinerary(h, w, p, 6, seed=0)
    print("start", np.round(c, 6), "return times", [r.n for r in records])
    assert itinerary(h, w, p, c, 6) == records

    growth, _ = measured_expansion(h, w, p, c, 6)
    dominant = max(abs(complex(z)) for z in full_report(h, p, n).eigenvalues)
    print(f"measured expansion {growth:.6g}, dominant eigenvalue {dominant:.6g}")

    jac, m = finite_difference_jacobian(h, w, p, c)
    print(f"finite-difference Jacobian at the start (n={m}):\n{np.round(jac, 6)}")


if __name__ == "__main__":
    main()
