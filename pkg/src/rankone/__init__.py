"""Eigenvalue asymptotics of rank-one perturbations ``B(tau) = A + tau u v^*``.

The analysis path (:mod:`rankone.perturb`) computes the minimal polynomial,
the index ``kappa``, the polynomial ``p_uv`` and the Puiseux coefficients of
the eigenvalue branches as ``|tau| -> infinity``.  The oracle path
(:mod:`rankone.oracle`) computes eigenvalues of ``B(tau)`` by brute force
and measures how well the expansions track them.
"""
from .errors import (
    AnalysisUnavailable,
    ConsistencyError,
    EigenvalueCollisionError,
    NumericalFailure,
    ProblemFileError,
    RankOneError,
    SingularMatrixError,
)
from .matcore import char_poly, minimal_poly, moments, resolvent_moments
from .oracle import (
    approx_error,
    convergence_order,
    determinant_cross_check,
    monodromy_check,
    spectrum_B,
    sweep,
)
from .perturb import (
    Classification,
    ProblemInstance,
    analyze,
    branch_point_infinity,
    finite_clusters,
    gamma_finite,
    infinity_expansion,
)
from .poly import CPoly, cluster_roots, poly_roots

__version__ = "0.1.0"

__all__ = [
    "AnalysisUnavailable",
    "ConsistencyError",
    "EigenvalueCollisionError",
    "NumericalFailure",
    "ProblemFileError",
    "RankOneError",
    "SingularMatrixError",
    "char_poly",
    "minimal_poly",
    "moments",
    "resolvent_moments",
    "approx_error",
    "convergence_order",
    "determinant_cross_check",
    "monodromy_check",
    "spectrum_B",
    "sweep",
    "Classification",
    "ProblemInstance",
    "analyze",
    "branch_point_infinity",
    "finite_clusters",
    "gamma_finite",
    "infinity_expansion",
    "CPoly",
    "cluster_roots",
    "poly_roots",
]
