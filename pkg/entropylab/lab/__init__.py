"""Inequality checks, verdict records and the check registry."""

from entropylab.lab.checks import (
    check_entropy_sandwich,
    check_epi,
    check_estimator_agreement,
    check_gaussian_sandwich,
    check_kappa_entropy_lower,
    check_knn_accuracy,
    check_reverse_bm,
    check_submodularity,
    concentration_profile,
    concentration_reports,
    hyperplane_reports,
    hyperplane_scan,
    kappa_convolution,
    reverse_epi_pipeline,
    typical_set_mass,
    uniform_approximation_scan,
)
from entropylab.lab.reports import (
    ConcentrationProfile,
    HyperplaneRow,
    InequalityReport,
    ReportSide,
    StageRecord,
)

__all__ = [
    "ConcentrationProfile",
    "HyperplaneRow",
    "InequalityReport",
    "ReportSide",
    "StageRecord",
    "check_entropy_sandwich",
    "check_epi",
    "check_estimator_agreement",
    "check_gaussian_sandwich",
    "check_kappa_entropy_lower",
    "check_knn_accuracy",
    "check_reverse_bm",
    "check_submodularity",
    "concentration_profile",
    "concentration_reports",
    "hyperplane_reports",
    "hyperplane_scan",
    "kappa_convolution",
    "reverse_epi_pipeline",
    "typical_set_mass",
    "uniform_approximation_scan",
]
