"""Curvature-based stability analysis for linear time-invariant systems."""

from curvestab._core import (  # noqa: F401
    JordanBlock,
    JordanSpec,
    LimitClass,
    SpectrumSummary,
    StabilityVerdict,
    Trace,
    apply_power,
    block_exponential,
    classify_limit,
    classify_report_json,
    closed_form_trajectory,
    eigenvalues,
    equivalence_bounds,
    expm,
    materialize,
    parse_system,
    predict_limit_symbolic,
    sample_initial_values,
    sample_trace,
    singular_values,
    spectral_stability,
    spectrum_summary,
)

__all__ = [
    "JordanBlock",
    "JordanSpec",
    "LimitClass",
    "SpectrumSummary",
    "StabilityVerdict",
    "Trace",
    "apply_power",
    "block_exponential",
    "classify_limit",
    "classify_report_json",
    "closed_form_trajectory",
    "eigenvalues",
    "equivalence_bounds",
    "expm",
    "materialize",
    "parse_system",
    "predict_limit_symbolic",
    "sample_initial_values",
    "sample_trace",
    "singular_values",
    "spectral_stability",
    "spectrum_summary",
]
