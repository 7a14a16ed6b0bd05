"""
Error Reports

Relative error of an approximate solution along verification paths, drawn on
a fine grid from the VERIFY seed domain (never used in training).
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np

from src.adapters.base_adapter import SolutionAdapter
from src.common.artifacts import write_csv
from src.common.errors import ConfigError
from src.problems.definition import ProblemDefinition
from src.simulate.euler import iter_forward_chunks
from src.simulate.grid import TimeGrid
from src.simulate.rng import SeedDomain, stream_for

logger = logging.getLogger("Evaluation")

VERIFY_PATHS = 1000
VERIFY_STEPS = 1000
REPORT_COLUMNS = ("station", "t", "mean", "sd", "mean_plus_2sd")


@dataclass
class ErrorReport:
    """Per-station mean and standard deviation of e_n over verification paths."""

    stations: np.ndarray
    mean: np.ndarray
    sd: np.ndarray
    n_paths: int
    y0_relative_error: float
    label: str = ""
    radius: float = 0.0
    extra: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if not (self.stations.shape == self.mean.shape == self.sd.shape):
            raise ValueError("stations, mean and sd must have the same length")

    @property
    def mean_plus_2sd(self) -> np.ndarray:
        return self.mean + 2.0 * self.sd

    @property
    def overall_max_mean(self) -> float:
        return float(np.max(self.mean))

    def rows(self):
        for n, (t, m, s, m2) in enumerate(zip(self.stations, self.mean, self.sd, self.mean_plus_2sd)):
            yield [n, float(t), float(m), float(s), float(m2)]

    def to_csv(self, path: Union[str, Path], provenance: Optional[Dict[str, Any]] = None) -> Path:
        return write_csv(path, REPORT_COLUMNS, self.rows(), provenance=provenance)


class _StationMoments:
    """Running per-station mean / M2 merged chunk by chunk (Chan et al.)."""

    def __init__(self, n_stations: int):
        self.count = 0
        self.mean = np.zeros(n_stations)
        self.m2 = np.zeros(n_stations)

    def update(self, errors: np.ndarray) -> None:
        """errors: (paths, stations)."""
        k = errors.shape[0]
        chunk_mean = errors.mean(axis=0)
        chunk_m2 = ((errors - chunk_mean) ** 2).sum(axis=0)
        total = self.count + k
        delta = chunk_mean - self.mean
        self.mean = self.mean + delta * (k / total)
        self.m2 = self.m2 + chunk_m2 + delta ** 2 * (self.count * k / total)
        self.count = total

    @property
    def sd(self) -> np.ndarray:
        return np.sqrt(self.m2 / self.count) if self.count else np.zeros_like(self.m2)


def _relative_errors(adapter: SolutionAdapter, problem: ProblemDefinition, grid: TimeGrid,
                     x: np.ndarray) -> np.ndarray:
    """e_n for every path of a chunk: (paths, N + 1)."""
    errors = np.empty(x.shape[:2])
    for n, t in enumerate(grid.stations):
        exact = problem.exact_u(t, x[:, n])
        errors[:, n] = np.abs(adapter.predict(t, x[:, n]) - exact) / np.abs(exact)
    return errors


def y0_relative_error(adapter: SolutionAdapter, problem: ProblemDefinition, x0=None) -> float:
    """|u_theta(0, x0) - u(0, x0)| / |u(0, x0)|."""
    _require_exact(problem)
    x = np.asarray(problem.x0 if x0 is None else x0, dtype=np.float64).reshape(1, -1)
    exact = float(problem.exact_u(0.0, x)[0])
    return abs(float(adapter.predict(0.0, x)[0]) - exact) / abs(exact)


def _require_exact(problem: ProblemDefinition) -> None:
    if not problem.has_exact_solution:
        raise ConfigError(f"problem {problem.name} has no exact solution to verify against", field="problem")


def _report_from_starts(
        adapter: SolutionAdapter,
        problem: ProblemDefinition,
        starts: np.ndarray,
        fine_steps: int,
        seed: int,
        chunk: int,
        label: str,
        radius: float,
) -> ErrorReport:
    _require_exact(problem)
    grid = TimeGrid(n_steps=fine_steps, horizon=problem.horizon)
    stream = stream_for(seed, SeedDomain.VERIFY)
    moments = _StationMoments(grid.n_steps + 1)
    for _, batch in iter_forward_chunks(problem, grid, stream, starts.shape[0], x0=starts, chunk=chunk):
        moments.update(_relative_errors(adapter, problem, grid, batch.X))

    report = ErrorReport(
        stations=grid.stations,
        mean=moments.mean,
        sd=moments.sd,
        n_paths=starts.shape[0],
        y0_relative_error=y0_relative_error(adapter, problem),
        label=label,
        radius=radius,
    )
    logger.info(
        f"✓ {label or 'report'}: max mean error {report.overall_max_mean:.3e}, "
        f"Y0 error {report.y0_relative_error:.3e} over {report.n_paths} paths"
    )
    return report


def verify_relative_error(
        adapter: SolutionAdapter,
        problem: ProblemDefinition,
        n_paths: int = VERIFY_PATHS,
        fine_steps: int = VERIFY_STEPS,
        seed: int = 0,
        chunk: int = 250,
        label: str = "",
) -> ErrorReport:
    """
    e_n = |u_theta(t_n, X_n) - u(t_n, X_n)| / |u(t_n, X_n)| along fine forward paths
    from the anchor x0, aggregated into per-station mean and SD. The paths come
    from the forward SDE alone, which for a decoupled problem are the states every
    scheme rolls out (X1 and X2 coincide). Coupled problems are rejected by the
    forward simulator.
    """
    starts = problem.initial_states(n_paths)
    return _report_from_starts(adapter, problem, starts, fine_steps, seed, chunk, label, 0.0)


def perturbed_starts(problem: ProblemDefinition, radius: float, n_paths: int, seed: int) -> np.ndarray:
    """
    (x0)_j (1 + eps_j) with eps_j uniform on (-R, R); path 0 stays at x0.
    """
    if radius < 0:
        raise ConfigError(f"radius must be non-negative, got {radius}", field="radius")
    starts = problem.initial_states(n_paths)
    if radius == 0:
        return starts
    stream = stream_for(seed, SeedDomain.NEIGHBORHOOD)
    for p in range(1, n_paths):
        eps = stream.generator(p).uniform(-radius, radius, size=problem.dim)
        starts[p] = problem.x0 * (1.0 + eps)
    return starts


def neighborhood_study(
        adapter: SolutionAdapter,
        problem: ProblemDefinition,
        radius: float,
        n_paths: int = VERIFY_PATHS,
        fine_steps: int = VERIFY_STEPS,
        seed: int = 0,
        chunk: int = 250,
        label: str = "",
) -> ErrorReport:
    """Same measurement as verify_relative_error from perturbed starts."""
    starts = perturbed_starts(problem, radius, n_paths, seed)
    return _report_from_starts(adapter, problem, starts, fine_steps, seed, chunk,
                               label or f"R={radius:g}", float(radius))
