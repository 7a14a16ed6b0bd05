"""
Exact and predicted u along a handful of verification paths, with the path norm.
"""

from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np

from src.adapters.base_adapter import SolutionAdapter
from src.common.artifacts import write_csv
from src.evaluation.report import VERIFY_STEPS, _require_exact
from src.problems.definition import ProblemDefinition
from src.simulate.euler import simulate_forward_only
from src.simulate.grid import TimeGrid
from src.simulate.rng import SeedDomain, stream_for

SAMPLE_COLUMNS = ("path_id", "n", "t", "norm_x", "exact", "predicted")


def predict_sample_paths(
        adapter: SolutionAdapter,
        problem: ProblemDefinition,
        n_paths: int = 8,
        fine_steps: int = VERIFY_STEPS,
        seed: int = 0,
) -> np.ndarray:
    """
    Rows (path_id, n, t, |X_t|, u(t, X_t), u_theta(t, X_t)), path-major.

    Paths are the first n_paths verification paths for the same seed.
    """
    _require_exact(problem)
    grid = TimeGrid(n_steps=fine_steps, horizon=problem.horizon)
    batch = simulate_forward_only(problem, grid, stream_for(seed, SeedDomain.VERIFY), n_paths)

    rows = np.empty((n_paths, grid.n_steps + 1, len(SAMPLE_COLUMNS)))
    for n, t in enumerate(grid.stations):
        x = batch.X[:, n]
        rows[:, n, 0] = np.arange(n_paths)
        rows[:, n, 1] = n
        rows[:, n, 2] = t
        rows[:, n, 3] = np.linalg.norm(x, axis=1)
        rows[:, n, 4] = problem.exact_u(t, x)
        rows[:, n, 5] = adapter.predict(t, x)
    return rows.reshape(-1, len(SAMPLE_COLUMNS))


def write_sample_paths(path: Union[str, Path], rows: np.ndarray,
                       provenance: Optional[Dict[str, Any]] = None) -> Path:
    table = ([int(r[0]), int(r[1]), float(r[2]), float(r[3]), float(r[4]), float(r[5])] for r in rows)
    return write_csv(path, SAMPLE_COLUMNS, table, provenance=provenance)
