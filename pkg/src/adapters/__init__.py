"""
Solution Adapters Package

Adapters normalizing every source of an approximate solution u(t, x).
"""

from src.adapters.base_adapter import (
    SolutionAdapter,
    ExactSolutionAdapter,
    ScaledSolutionAdapter,
    create_adapter,
)
from src.adapters.network_adapter import (
    NetworkSolutionAdapter,
    DeepBsdeAdapter,
    load_adapter,
)

__all__ = [
    "SolutionAdapter",
    "ExactSolutionAdapter",
    "ScaledSolutionAdapter",
    "NetworkSolutionAdapter",
    "DeepBsdeAdapter",
    "create_adapter",
    "load_adapter",
]
