"""
LangGraph study workflows.
"""

from src.workflows.convergence_graph import ConvergenceWorkflow
from src.workflows.mscale_compare_graph import MscaleComparisonWorkflow

__all__ = ["ConvergenceWorkflow", "MscaleComparisonWorkflow"]
