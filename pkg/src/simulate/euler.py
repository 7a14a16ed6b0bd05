"""
Euler-Maruyama stepping for the forward state X and the driver-based
recursion for Y, plus the forward-only simulators used for verification.
"""

import logging
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from src.autodiff import backend as B
from src.common.errors import ConfigError, SimulationBlowUp
from src.problems.definition import ProblemDefinition
from src.simulate.grid import TimeGrid
from src.simulate.paths import PathBatch, aggregate_increments, sample_increments
from src.simulate.rng import RngStream

logger = logging.getLogger("Simulate")

DEFAULT_CHUNK = 500


def _require_finite(value, quantity: str, station: Optional[int], path_offset: int) -> None:
    data = B.to_numpy(value)
    if np.all(np.isfinite(data)):
        return
    bad = np.argwhere(~np.isfinite(data.reshape(data.shape[0], -1)))
    raise SimulationBlowUp(
        "Euler-Maruyama produced a non-finite state",
        path=path_offset + int(bad[0, 0]),
        station=station,
        quantity=quantity,
    )


def euler_x_step(problem: ProblemDefinition, t_n: float, x_n, y_n, z_n, dw_n: np.ndarray, dt: float,
                 station: Optional[int] = None, path_offset: int = 0):
    """X_{n+1} = X_n + mu dt + sigma dW_n."""
    x_next = x_n + problem.mu(t_n, x_n, y_n, z_n) * dt + problem.diffusion_times(t_n, x_n, y_n, dw_n)
    _require_finite(x_next, "X", None if station is None else station + 1, path_offset)
    return x_next


def euler_y_step(problem: ProblemDefinition, t_n: float, x_n, y_n, z_n, dw_n: np.ndarray, dt: float,
                 station: Optional[int] = None, path_offset: int = 0):
    """Y_{n+1} = Y_n + phi dt + Z_n^T sigma dW_n."""
    noise = B.row_dot(z_n, problem.diffusion_times(t_n, x_n, y_n, dw_n))
    y_next = y_n + problem.phi(t_n, x_n, y_n, z_n) * dt + noise
    _require_finite(y_next, "Y", None if station is None else station + 1, path_offset)
    return y_next


# ==================== FORWARD-ONLY PATHS ====================

def _initial_batch(problem: ProblemDefinition, x0, m: int) -> np.ndarray:
    if x0 is None:
        return problem.initial_states(m)
    x0 = np.asarray(x0, dtype=np.float64)
    if x0.ndim == 1:
        if x0.shape[0] != problem.dim:
            raise ConfigError(f"x0 has length {x0.shape[0]}, problem has d={problem.dim}", field="x0")
        return np.tile(x0, (m, 1))
    if x0.shape != (m, problem.dim):
        raise ConfigError(f"x0 batch has shape {x0.shape}, expected {(m, problem.dim)}", field="x0")
    return x0.copy()


def roll_forward(problem: ProblemDefinition, x_start: np.ndarray, dw: np.ndarray, grid: TimeGrid,
                 path_offset: int = 0) -> np.ndarray:
    """X trajectories (m, N+1, d) for a decoupled problem under given increments."""
    if not problem.is_decoupled:
        raise ConfigError(f"problem {problem.name} is coupled; forward paths need Y and Z", field="problem")
    m, n_steps, d = dw.shape
    stations = grid.stations
    zeros_y = np.zeros(m)
    zeros_z = np.zeros((m, d))

    x = np.empty((m, n_steps + 1, d))
    x[:, 0] = x_start
    for n in range(n_steps):
        x[:, n + 1] = euler_x_step(problem, stations[n], x[:, n], zeros_y, zeros_z, dw[:, n],
                                   grid.dt, station=n, path_offset=path_offset)
    return x


def simulate_forward_only(
        problem: ProblemDefinition,
        grid: TimeGrid,
        stream: RngStream,
        m: int,
        x0=None,
        path_offset: int = 0,
        workers: int = 1,
) -> PathBatch:
    """
    Forward trajectories of a decoupled problem.

    x0 may be None (the problem's anchor), one state (d,) or a batch (m, d).
    """
    if not problem.is_decoupled:
        raise ConfigError(f"problem {problem.name} is coupled; forward paths need Y and Z", field="problem")
    x_start = _initial_batch(problem, x0, m)
    dw = sample_increments(m, grid, problem.dim, stream, path_offset=path_offset, workers=workers)
    x = roll_forward(problem, x_start, dw, grid, path_offset=path_offset)
    return PathBatch(grid=grid, dW=dw, X=x)


def iter_forward_chunks(
        problem: ProblemDefinition,
        grid: TimeGrid,
        stream: RngStream,
        m: int,
        x0=None,
        chunk: int = DEFAULT_CHUNK,
        workers: int = 1,
) -> Iterator[Tuple[int, PathBatch]]:
    """
    Yield (path_offset, PathBatch) over m paths in chunks.

    Per-path substreams make the union of chunks equal to a single batch.
    """
    x_start = _initial_batch(problem, x0, m)
    for start in range(0, m, chunk):
        stop = min(start + chunk, m)
        yield start, simulate_forward_only(problem, grid, stream, stop - start, x0=x_start[start:stop],
                                           path_offset=start, workers=workers)


def simulate_exact_pathbatch(problem: ProblemDefinition, grid: TimeGrid, stream: RngStream, m: int,
                             x0=None) -> PathBatch:
    """Forward paths with Y and Z filled from the closed-form solution."""
    if not problem.has_exact_solution:
        raise ConfigError(f"problem {problem.name} has no exact solution", field="problem")
    batch = simulate_forward_only(problem, grid, stream, m, x0=x0)
    stations = grid.stations
    y = np.empty((m, grid.n_steps + 1))
    z = np.empty_like(batch.X)
    for n, t in enumerate(stations):
        y[:, n] = problem.exact_u(t, batch.X[:, n])
        z[:, n] = problem.exact_grad(t, batch.X[:, n])
    return PathBatch(grid=grid, dW=batch.dW, X=batch.X, Y=y, Z=z)


# ==================== STRONG ERROR HARNESS ====================

def terminal_strong_error(
        problem: ProblemDefinition,
        n_list: Sequence[int],
        n_paths: int,
        stream: RngStream,
        chunk: int = DEFAULT_CHUNK,
) -> Dict[int, float]:
    """
    E|Y_N - g(X_N)| of the exact-gradient-driven Y recursion for each N.

    Every N is driven by the same Brownian paths, drawn on the finest grid
    and aggregated.
    """
    if not problem.has_exact_solution or problem.exact_grad is None:
        raise ConfigError(f"problem {problem.name} needs exact_u and exact_grad", field="problem")
    n_list = sorted(int(n) for n in n_list)
    fine = TimeGrid(n_steps=n_list[-1], horizon=problem.horizon)
    for n in n_list:
        if fine.n_steps % n != 0:
            raise ConfigError(f"N={n} does not divide the finest grid N={fine.n_steps}", field="n_list")

    totals = {n: 0.0 for n in n_list}
    for start in range(0, n_paths, chunk):
        m = min(chunk, n_paths - start)
        dw_fine = sample_increments(m, fine, problem.dim, stream, path_offset=start)
        for n in n_list:
            grid = TimeGrid(n_steps=n, horizon=problem.horizon)
            dw = aggregate_increments(dw_fine, n)
            x = problem.initial_states(m)
            y = problem.exact_u(0.0, x)
            for k, t in enumerate(grid.stations[:-1]):
                z = problem.exact_grad(t, x)
                x_next = euler_x_step(problem, t, x, y, z, dw[:, k], grid.dt, station=k, path_offset=start)
                y = euler_y_step(problem, t, x, y, z, dw[:, k], grid.dt, station=k, path_offset=start)
                x = x_next
            totals[n] += float(np.sum(np.abs(y - problem.g(x))))

    errors = {n: totals[n] / n_paths for n in n_list}
    logger.info("Terminal strong errors: " + ", ".join(f"N={n}: {e:.3e}" for n, e in errors.items()))
    return errors


def fit_log_slope(ns: Sequence[float], errors: Sequence[float]) -> float:
    """Least-squares slope of log(error) against log(N)."""
    ns = np.asarray(ns, dtype=np.float64)
    errors = np.asarray(errors, dtype=np.float64)
    if ns.shape != errors.shape or ns.size < 2:
        raise ValueError("need at least two (N, error) pairs of equal length")
    if np.any(ns <= 0) or np.any(errors <= 0):
        raise ValueError("N and errors must be positive for a log-log fit")
    slope, _ = np.polyfit(np.log(ns), np.log(errors), 1)
    return float(slope)


__all__: List[str] = [
    "euler_x_step",
    "euler_y_step",
    "roll_forward",
    "simulate_forward_only",
    "iter_forward_chunks",
    "simulate_exact_pathbatch",
    "terminal_strong_error",
    "fit_log_slope",
]
