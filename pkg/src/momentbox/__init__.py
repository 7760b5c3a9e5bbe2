"""Bounds on the support of a measure from the moments of its marginals."""

__version__ = "0.1.0"

from .bounds import ClosedFormBounds, closed_form_bounds
from .dual import SosCertificate, extract_certificate, verify_slackness
from .errors import (
    BreakdownError,
    CertificateUnavailable,
    InsufficientMomentsError,
    MomentError,
)
from .hankel import (
    PsdVerdict,
    charpoly_coefficients,
    descartes_feasible,
    exact_charpoly_coefficients,
    localizing_matrix,
    moment_matrix,
    psd_check,
)
from .hierarchy import (
    BoxEstimate,
    IntervalEstimate,
    bound_box,
    joint_interval,
    run_hierarchy,
    solve_lower,
    solve_upper,
)
from .ingest import (
    MarginalSet,
    MomentSequence,
    affine_transform,
    moments_closed_form,
    moments_from_samples,
    validate,
)
from .ortho import Recurrence, gauss_nodes, moments_to_recurrence

__all__ = [
    "BoxEstimate",
    "BreakdownError",
    "CertificateUnavailable",
    "ClosedFormBounds",
    "InsufficientMomentsError",
    "IntervalEstimate",
    "MarginalSet",
    "MomentError",
    "MomentSequence",
    "PsdVerdict",
    "Recurrence",
    "SosCertificate",
    "affine_transform",
    "bound_box",
    "charpoly_coefficients",
    "closed_form_bounds",
    "descartes_feasible",
    "exact_charpoly_coefficients",
    "extract_certificate",
    "gauss_nodes",
    "joint_interval",
    "localizing_matrix",
    "moment_matrix",
    "moments_closed_form",
    "moments_from_samples",
    "moments_to_recurrence",
    "psd_check",
    "run_hierarchy",
    "solve_lower",
    "solve_upper",
    "validate",
    "verify_slackness",
]
