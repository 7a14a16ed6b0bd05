"""
Brownian increments, Euler-Maruyama stepping and path batches.
"""

from src.simulate.rng import RngStream, SeedDomain, stream_for
from src.simulate.grid import TimeGrid
from src.simulate.paths import PathBatch, aggregate_increments, sample_increments
from src.simulate.euler import (
    euler_x_step,
    euler_y_step,
    roll_forward,
    simulate_forward_only,
    iter_forward_chunks,
    simulate_exact_pathbatch,
    terminal_strong_error,
    fit_log_slope,
)

__all__ = [
    "RngStream",
    "SeedDomain",
    "stream_for",
    "TimeGrid",
    "PathBatch",
    "aggregate_increments",
    "sample_increments",
    "euler_x_step",
    "euler_y_step",
    "roll_forward",
    "simulate_forward_only",
    "iter_forward_chunks",
    "simulate_exact_pathbatch",
    "terminal_strong_error",
    "fit_log_slope",
]
