"""
Dense float64 reverse-mode automatic differentiation with second-order support.
"""

from src.autodiff.tape import AdTape, AdValue, Node
from src.autodiff.grad import gradients, grad_wrt_inputs, grad_wrt_leaves
from src.autodiff.checks import finite_diff_check
from src.autodiff import ops, backend

__all__ = [
    "AdTape",
    "AdValue",
    "Node",
    "gradients",
    "grad_wrt_inputs",
    "grad_wrt_leaves",
    "finite_diff_check",
    "ops",
    "backend",
]
