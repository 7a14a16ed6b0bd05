"""
Brownian increments and simulated path batches.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np

from src.simulate.grid import TimeGrid
from src.simulate.rng import RngStream

logger = logging.getLogger("Simulate")


def _draw_paths(stream: RngStream, start: int, stop: int, n_steps: int, d: int, out: np.ndarray,
                path_offset: int) -> None:
    for p in range(start, stop):
        out[p] = stream.generator(path_offset + p).standard_normal((n_steps, d))


def sample_increments(
        m: int,
        grid: TimeGrid,
        d: int,
        stream: RngStream,
        path_offset: int = 0,
        workers: int = 1,
) -> np.ndarray:
    """
    Brownian increments dW of shape (m, N, d), i.i.d. N(0, dt).

    Path p draws from stream.generator(path_offset + p), so results do not
    depend on chunking or on the number of workers.
    """
    if m < 1 or d < 1:
        raise ValueError(f"need m >= 1 and d >= 1, got m={m}, d={d}")

    normals = np.empty((m, grid.n_steps, d))
    if workers <= 1 or m < 2 * workers:
        _draw_paths(stream, 0, m, grid.n_steps, d, normals, path_offset)
    else:
        bounds = np.linspace(0, m, workers + 1).astype(int)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_draw_paths, stream, int(a), int(b), grid.n_steps, d, normals, path_offset)
                for a, b in zip(bounds[:-1], bounds[1:])
            ]
            for future in futures:
                future.result()
    return normals * np.sqrt(grid.dt)


def aggregate_increments(dw: np.ndarray, n_steps: int) -> np.ndarray:
    """
    Sum fine increments (m, N_fine, d) into a coarser grid of n_steps.

    Coarse and fine runs are then driven by the same Brownian path.
    """
    m, fine, d = dw.shape
    if n_steps < 1 or fine % n_steps != 0:
        raise ValueError(f"coarse grid N={n_steps} does not divide fine grid N={fine}")
    ratio = fine // n_steps
    if ratio == 1:
        return dw
    return dw.reshape(m, n_steps, ratio, d).sum(axis=2)


@dataclass
class PathBatch:
    """
    Simulated trajectories indexed by (sample, time station).

    dW: (m, N, d); X: (m, N+1, d); Y: (m, N+1); Z: (m, N+1, d)
    """

    grid: TimeGrid
    dW: np.ndarray
    X: np.ndarray
    Y: Optional[np.ndarray] = None
    Z: Optional[np.ndarray] = None

    def __post_init__(self):
        m, n, d = self.dW.shape
        if n != self.grid.n_steps:
            raise ValueError(f"increments have {n} steps, grid has {self.grid.n_steps}")
        if self.X.shape != (m, n + 1, d):
            raise ValueError(f"X has shape {self.X.shape}, expected {(m, n + 1, d)}")
        if self.Y is not None and self.Y.shape != (m, n + 1):
            raise ValueError(f"Y has shape {self.Y.shape}, expected {(m, n + 1)}")
        if self.Z is not None and self.Z.shape != (m, n + 1, d):
            raise ValueError(f"Z has shape {self.Z.shape}, expected {(m, n + 1, d)}")

    @property
    def m(self) -> int:
        return self.dW.shape[0]

    @property
    def dim(self) -> int:
        return self.dW.shape[2]

    def is_finite(self) -> bool:
        arrays = [a for a in (self.dW, self.X, self.Y, self.Z) if a is not None]
        return all(np.all(np.isfinite(a)) for a in arrays)

    def to_csv(self, path: Union[str, Path], header_comment: str = "") -> Path:
        """
        Write the trajectory dump.

        Columns: path_id, n, t, X_1..X_d, Y, Z_1..Z_d (Y / Z as NaN if absent).
        """
        m, n1, d = self.X.shape
        stations = self.grid.stations
        path_ids = np.repeat(np.arange(m), n1)
        steps = np.tile(np.arange(n1), m)
        y = self.Y if self.Y is not None else np.full((m, n1), np.nan)
        z = self.Z if self.Z is not None else np.full((m, n1, d), np.nan)

        table = np.column_stack([
            path_ids,
            steps,
            stations[steps],
            self.X.reshape(m * n1, d),
            y.reshape(m * n1),
            z.reshape(m * n1, d),
        ])
        columns = (["path_id", "n", "t"] + [f"X_{i + 1}" for i in range(d)]
                   + ["Y"] + [f"Z_{i + 1}" for i in range(d)])
        fmt = ["%d", "%d"] + ["%.17g"] * (1 + 2 * d + 1)

        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        header = ",".join(columns)
        if header_comment:
            header = f"# {header_comment}\n{header}"
        np.savetxt(path, table, fmt=fmt, delimiter=",", header=header, comments="")
        logger.info(f"✓ Wrote {m} trajectories to {path}")
        return path
