"""
Problem definitions for the FBSDE solvers.
"""

from src.problems.definition import (
    ProblemDefinition,
    anchor_x0,
    pde_residual,
    relative_pde_residual,
)
from src.problems.bsb import (
    BsbParams,
    OscBsbParams,
    make_bsb,
    make_osc_bsb,
    power_sums,
    oscillation_source,
)

__all__ = [
    "ProblemDefinition",
    "anchor_x0",
    "pde_residual",
    "relative_pde_residual",
    "BsbParams",
    "OscBsbParams",
    "make_bsb",
    "make_osc_bsb",
    "power_sums",
    "oscillation_source",
]
