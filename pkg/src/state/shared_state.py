"""
Shared State Definition

TypedDict passed between the nodes of the study workflows.
"""

from typing import Any, Dict, List, Optional, TypedDict


class StudyState(TypedDict, total=False):
    """
    Complete state for a multi-run study.

    Each node reads what it needs and returns only the keys it changes.
    """

    # ==================== INPUT ====================
    config: Any  # RunConfig
    n_list: List[int]  # step counts of a convergence study
    architectures: List[str]  # network presets of a comparison study
    output_dir: Optional[str]

    # ==================== TRAINING ====================
    pending: List[Any]  # N values or presets still to train
    adapters: Dict[Any, Any]  # trained adapter per N / preset
    loss_histories: Dict[Any, List[Dict[str, Any]]]
    aborted: List[Any]

    # ==================== EVALUATION ====================
    reports: Dict[Any, Any]  # ErrorReport per N / preset
    y0_errors: Dict[Any, float]
    table_rows: List[Any]  # ConvergenceRow list
    field_reports: Dict[int, Any]  # FieldExtrapolationReport per coarse N

    # ==================== METADATA ====================
    artifacts: List[str]
    execution_metadata: Dict[str, Any]
    errors: List[str]


def create_initial_state(
    config: Any,
    n_list: Optional[List[int]] = None,
    architectures: Optional[List[str]] = None,
    output_dir: Optional[str] = None,
) -> StudyState:
    """
    Create initial study state.

    Args:
        config: Validated RunConfig
        n_list: Step counts to train (convergence study)
        architectures: Network presets to train (comparison study)
        output_dir: Where artifacts go; None keeps everything in memory

    Returns:
        Initial state dictionary
    """
    return {
        "config": config,
        "n_list": list(n_list or []),
        "architectures": list(architectures or []),
        "output_dir": output_dir,
        "pending": [],
        "adapters": {},
        "loss_histories": {},
        "aborted": [],
        "reports": {},
        "y0_errors": {},
        "table_rows": [],
        "field_reports": {},
        "artifacts": [],
        "execution_metadata": {},
        "errors": [],
    }
