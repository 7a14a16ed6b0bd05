"""
Artifact writers.

CSV files carry a leading comment line with provenance (config hash, seed)
and format floats with %.17g so reruns produce byte-identical files.
"""

import csv
import hashlib
import json
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Sequence, Union

from src.common.errors import CheckpointError


def format_value(value: Any) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.17g}"
    if value is None:
        return ""
    return str(value)


def provenance_comment(provenance: Optional[Dict[str, Any]]) -> str:
    if not provenance:
        return ""
    return " ".join(f"{key}={format_value(provenance[key])}" for key in sorted(provenance))


def write_csv(
        path: Union[str, Path],
        columns: Sequence[str],
        rows: Iterable[Sequence[Any]],
        provenance: Optional[Dict[str, Any]] = None,
        append: bool = False,
) -> Path:
    """Write (or append) rows under a header, with a '# key=value' provenance line."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fresh = not append or not path.exists()
    try:
        with open(path, "a" if not fresh else "w", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            if fresh:
                comment = provenance_comment(provenance)
                if comment:
                    handle.write(f"# {comment}\n")
                writer.writerow(columns)
            for row in rows:
                writer.writerow([format_value(v) for v in row])
    except OSError as exc:
        raise CheckpointError(f"cannot write {path}: {exc}") from exc
    return path


def read_csv(path: Union[str, Path]) -> list:
    """Rows as dicts, skipping '#' comment lines."""
    path = Path(path)
    if not path.exists():
        raise CheckpointError(f"file not found: {path}")
    with open(path, newline="") as handle:
        lines = [line for line in handle if not line.startswith("#")]
    return list(csv.DictReader(lines))


def write_json(path: Union[str, Path], payload: Dict[str, Any]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    try:
        path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=str))
    except OSError as exc:
        raise CheckpointError(f"cannot write {path}: {exc}") from exc
    return path


def content_hash(payload: Dict[str, Any]) -> str:
    """SHA-256 of canonical JSON (sorted keys)."""
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
