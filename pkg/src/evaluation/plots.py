"""
SVG error curves: mean and mean + 2SD per series, log-scale y.
"""

from pathlib import Path
from typing import Any, Dict, Optional, Sequence, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from src.common.artifacts import provenance_comment  # noqa: E402
from src.common.errors import CheckpointError  # noqa: E402
from src.evaluation.report import ErrorReport  # noqa: E402

# Floor for log axes; exact-solution reports are identically zero.
LOG_FLOOR = 1e-16


def _positive(values: np.ndarray) -> np.ndarray:
    return np.maximum(np.asarray(values, dtype=np.float64), LOG_FLOOR)


def plot_error_reports(
        reports: Sequence[ErrorReport],
        path: Union[str, Path],
        title: str = "",
        provenance: Optional[Dict[str, Any]] = None,
) -> Path:
    """Two panels (mean, mean + 2SD), one curve per report."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    matplotlib.rcParams["svg.hashsalt"] = "fbsde"

    fig, (ax_mean, ax_band) = plt.subplots(1, 2, figsize=(10, 4), sharex=True)
    for report in reports:
        label = report.label or f"{report.n_paths} paths"
        ax_mean.plot(report.stations, _positive(report.mean), label=label)
        ax_band.plot(report.stations, _positive(report.mean_plus_2sd), label=label)
    for ax, ylabel in ((ax_mean, "mean relative error"), (ax_band, "mean + 2 SD")):
        ax.set_yscale("log")
        ax.set_xlabel("t")
        ax.set_ylabel(ylabel)
        ax.grid(True, alpha=0.3)
    if reports:
        ax_mean.legend()
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    _save(fig, path, title, provenance)
    return path


def plot_series(
        x: np.ndarray,
        series: Dict[str, np.ndarray],
        path: Union[str, Path],
        xlabel: str,
        ylabel: str,
        title: str = "",
        log_y: bool = False,
        provenance: Optional[Dict[str, Any]] = None,
) -> Path:
    """One curve per named series over a shared x axis."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    matplotlib.rcParams["svg.hashsalt"] = "fbsde"

    fig, ax = plt.subplots(figsize=(6, 4))
    for name, values in series.items():
        ax.plot(x, _positive(values) if log_y else values, label=name)
    if log_y:
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)
    if series:
        ax.legend()
    if title:
        ax.set_title(title)
    fig.tight_layout()
    _save(fig, path, title, provenance)
    return path


def _save(fig, path: Path, title: str, provenance: Optional[Dict[str, Any]]) -> None:
    metadata = {"Date": None, "Title": title or path.stem, "Description": provenance_comment(provenance)}
    try:
        fig.savefig(path, format="svg", metadata=metadata)
    except OSError as exc:
        raise CheckpointError(f"cannot write {path}: {exc}") from exc
    finally:
        plt.close(fig)
