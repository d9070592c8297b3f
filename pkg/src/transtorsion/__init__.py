"""Spectra of homoclinic transition maps near a partially hyperbolic torus.

The transition matrix is Pi . Df_l**n, where Pi is the 4x4 symplectic
homoclinic matrix and Df_l the differential of the linear inner map with
contraction lambda and torsion nu.  The package computes its characteristic
polynomial two ways, solves it through the reduction S = x + 1/x, checks the
result against a dense eigensolver, and simulates the window map.
"""

from .asymptotics import (
    AsymptoticsRow,
    AsymptoticsTable,
    SpecialCaseParams,
    asymptotic_table,
    exact_factor_residual,
    printed_factor_residual,
    special_case_factor,
    special_case_hyperbolicity,
)
from .config import PRECISION_MODES, RunConfig, Tolerances, get_tolerances, set_tolerances, using_tolerances
from .dynamics import (
    GOLDEN_OMEGA,
    ReturnRecord,
    WindowConfig,
    dn_membership,
    homoclinic_map_l,
    in_box,
    itinerary,
    measured_expansion,
    return_times,
    search_itinerary,
    transverse_map,
    window_map_l,
)
from .errors import (
    ConditioningExceeded,
    FactorizationMismatch,
    NonFinite,
    NonSymplectic,
    NotInDomain,
    NotPalindromic,
    NotStronglyTransverse,
    NotWithTorsion,
    NotYetHyperbolic,
    OracleMismatch,
    TransTorsionError,
)
from .homoclinic import (
    HomoclinicMatrix,
    TransversalityReport,
    d22_zero_ensemble,
    d22_zero_witness,
    is_transverse_rank_oracle,
    special_case_matrix,
    strongly_transverse_ensemble,
    symplectic_ensemble,
    transversality_delta,
    transversality_report,
)
from .linear_model import LinearModelParams, apply_f_l, check_guard, d_f_l, d_f_l_pow, max_n, orbit_point
from .spectrum import (
    CLASSIFICATIONS,
    PalindromicQuartic,
    SpectrumReport,
    classify,
    closed_form_coeffs,
    full_report,
    hyperbolic_onset,
    solve_palindromic,
    trace_coeffs,
    transition_matrix,
)
from .symplectic import J, Vec4, dense_eigenvalues, is_symplectic, random_symplectic

__version__ = "0.1.0"
