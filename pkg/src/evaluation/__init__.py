"""
Post-training accuracy: error reports, Richardson extrapolation,
neighborhood studies and plots.
"""

from src.evaluation.report import (
    ErrorReport,
    verify_relative_error,
    neighborhood_study,
    perturbed_starts,
    y0_relative_error,
    VERIFY_PATHS,
    VERIFY_STEPS,
    REPORT_COLUMNS,
)
from src.evaluation.extrapolation import (
    richardson,
    ExtrapolationPair,
    ConvergenceRow,
    FieldExtrapolationReport,
    validate_n_list,
    convergence_table,
    write_table,
    load_reference_table,
    render_table,
    field_extrapolation_report,
    EXTRAPOLATION_RATIO,
    TABLE_COLUMNS,
)
from src.evaluation.sample_paths import predict_sample_paths, write_sample_paths, SAMPLE_COLUMNS
from src.evaluation.plots import plot_error_reports, plot_series

__all__ = [
    "ErrorReport",
    "verify_relative_error",
    "neighborhood_study",
    "perturbed_starts",
    "y0_relative_error",
    "VERIFY_PATHS",
    "VERIFY_STEPS",
    "REPORT_COLUMNS",
    "richardson",
    "ExtrapolationPair",
    "ConvergenceRow",
    "FieldExtrapolationReport",
    "validate_n_list",
    "convergence_table",
    "write_table",
    "load_reference_table",
    "render_table",
    "field_extrapolation_report",
    "EXTRAPOLATION_RATIO",
    "TABLE_COLUMNS",
    "predict_sample_paths",
    "write_sample_paths",
    "SAMPLE_COLUMNS",
    "plot_error_reports",
    "plot_series",
]
