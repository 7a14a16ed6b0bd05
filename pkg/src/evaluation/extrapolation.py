"""
Richardson extrapolation between step counts N and 4N, and the convergence
table of Y0 errors.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Union

import numpy as np

from src.adapters.base_adapter import SolutionAdapter
from src.common.artifacts import read_csv, write_csv
from src.common.errors import ConfigError
from src.evaluation.report import VERIFY_PATHS, VERIFY_STEPS, _require_exact
from src.problems.definition import ProblemDefinition
from src.simulate.euler import iter_forward_chunks
from src.simulate.grid import TimeGrid
from src.simulate.rng import SeedDomain, stream_for

logger = logging.getLogger("Evaluation")

EXTRAPOLATION_RATIO = 4
TABLE_COLUMNS = ("scheme", "N", "raw_error", "extrapolated_error")


def richardson(value_n, value_4n):
    """2 u^{4N} - u^{N}; works on scalars and arrays alike."""
    return 2.0 * value_4n - value_n


@dataclass
class ExtrapolationPair:
    n_steps: int
    value_n: Any
    value_4n: Any

    @property
    def extrapolated(self):
        return richardson(self.value_n, self.value_4n)


def validate_n_list(n_list: Sequence[int], extrapolate: bool = True) -> List[int]:
    """Ascending, positive, and each 4x the previous when extrapolating."""
    n_list = [int(n) for n in n_list]
    if not n_list or any(n < 1 for n in n_list):
        raise ConfigError(f"N list must hold positive integers, got {n_list}", field="n_list")
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ConfigError(f"N list must be strictly ascending, got {n_list}", field="n_list")
    if extrapolate:
        for a, b in zip(n_list, n_list[1:]):
            if b != EXTRAPOLATION_RATIO * a:
                raise ConfigError(
                    f"extrapolation needs consecutive N in ratio {EXTRAPOLATION_RATIO}, got {a} -> {b}",
                    field="n_list",
                )
    return n_list


# ==================== CONVERGENCE TABLE ====================

@dataclass
class ConvergenceRow:
    scheme: str
    n_steps: int
    raw_error: float
    extrapolated_error: Optional[float] = None

    def csv_row(self) -> list:
        return [self.scheme, self.n_steps, self.raw_error, self.extrapolated_error]


def convergence_table(
        scheme: str,
        problem: ProblemDefinition,
        adapters: Mapping[int, SolutionAdapter],
        x0=None,
) -> List[ConvergenceRow]:
    """
    Relative Y0 error per N, plus the extrapolated error 2 u^N - u^{N/4}
    wherever N/4 is also present.
    """
    _require_exact(problem)
    x = np.asarray(problem.x0 if x0 is None else x0, dtype=np.float64).reshape(1, -1)
    exact = float(problem.exact_u(0.0, x)[0])
    values = {n: float(adapters[n].predict(0.0, x)[0]) for n in sorted(adapters)}

    rows = []
    for n, value in values.items():
        coarse = n // EXTRAPOLATION_RATIO
        extrapolated = None
        if n % EXTRAPOLATION_RATIO == 0 and coarse in values:
            extrapolated = abs(richardson(values[coarse], value) - exact) / abs(exact)
        rows.append(ConvergenceRow(scheme, n, abs(value - exact) / abs(exact), extrapolated))
    return rows


def write_table(path: Union[str, Path], rows: Sequence[ConvergenceRow],
                provenance: Optional[Dict[str, Any]] = None) -> Path:
    return write_csv(path, TABLE_COLUMNS, (row.csv_row() for row in rows), provenance=provenance)


def load_reference_table(path: Union[str, Path]) -> List[ConvergenceRow]:
    """Rows of a reference CSV with the table columns (blank extrapolated allowed)."""
    rows = []
    for record in read_csv(path):
        missing = [c for c in TABLE_COLUMNS if c not in record]
        if missing:
            raise ConfigError(f"reference table {path} lacks columns {missing}")
        extrapolated = record["extrapolated_error"].strip()
        rows.append(ConvergenceRow(
            scheme=record["scheme"],
            n_steps=int(record["N"]),
            raw_error=float(record["raw_error"]),
            extrapolated_error=float(extrapolated) if extrapolated else None,
        ))
    return rows


def render_table(rows: Sequence[ConvergenceRow]) -> str:
    """Side-by-side text table: one column pair (raw, extrapolated) per scheme."""
    schemes = list(dict.fromkeys(row.scheme for row in rows))
    n_values = sorted({row.n_steps for row in rows})
    lookup = {(row.scheme, row.n_steps): row for row in rows}

    def cell(value: Optional[float]) -> str:
        return f"{value:.2e}" if value is not None else "—"

    header = f"{'N':>6}" + "".join(f" | {s + ' raw':>12} {s + ' extrap':>12}" for s in schemes)
    lines = [header, "-" * len(header)]
    for n in n_values:
        line = f"{n:>6}"
        for scheme in schemes:
            row = lookup.get((scheme, n))
            raw = cell(row.raw_error if row else None)
            extrapolated = cell(row.extrapolated_error if row else None)
            line += f" | {raw:>12} {extrapolated:>12}"
        lines.append(line)
    return "\n".join(lines)


# ==================== FIELD EXTRAPOLATION ====================

@dataclass
class FieldExtrapolationReport:
    stations: np.ndarray
    mean_error_n: np.ndarray
    mean_error_4n: np.ndarray
    mean_error_extrapolated: np.ndarray

    COLUMNS = ("station", "t", "mean_error_N", "mean_error_4N", "mean_error_extrapolated")

    def rows(self):
        for n, t in enumerate(self.stations):
            yield [n, float(t), float(self.mean_error_n[n]), float(self.mean_error_4n[n]),
                   float(self.mean_error_extrapolated[n])]

    def to_csv(self, path: Union[str, Path], provenance: Optional[Dict[str, Any]] = None) -> Path:
        return write_csv(path, self.COLUMNS, self.rows(), provenance=provenance)


def field_extrapolation_report(
        adapter_n: SolutionAdapter,
        adapter_4n: SolutionAdapter,
        problem: ProblemDefinition,
        t_max: float = 0.1,
        n_paths: int = VERIFY_PATHS,
        fine_steps: int = VERIFY_STEPS,
        seed: int = 0,
        chunk: int = 250,
) -> FieldExtrapolationReport:
    """
    Mean relative error of u^N, u^{4N} and 2 u^{4N} - u^N along verification
    paths, restricted to stations t <= t_max (terminal fitting breaks the
    common error constant near T).
    """
    _require_exact(problem)
    grid = TimeGrid(n_steps=fine_steps, horizon=problem.horizon)
    stations = grid.stations
    keep = np.flatnonzero(stations <= t_max + 1e-12)
    sums = np.zeros((3, keep.size))

    stream = stream_for(seed, SeedDomain.VERIFY)
    for _, batch in iter_forward_chunks(problem, grid, stream, n_paths, chunk=chunk):
        for j, n in enumerate(keep):
            t, x = stations[n], batch.X[:, n]
            exact = problem.exact_u(t, x)
            u_n = adapter_n.predict(t, x)
            u_4n = adapter_4n.predict(t, x)
            for k, value in enumerate((u_n, u_4n, richardson(u_n, u_4n))):
                sums[k, j] += float(np.sum(np.abs(value - exact) / np.abs(exact)))

    means = sums / n_paths
    report = FieldExtrapolationReport(stations[keep], means[0], means[1], means[2])
    logger.info(
        f"✓ Field extrapolation on t <= {t_max}: raw 4N {means[1].mean():.3e}, "
        f"extrapolated {means[2].mean():.3e}"
    )
    return report
