"""
Parameter checkpoints.

One .npz archive per checkpoint holding the format version, the architecture
as canonical JSON, row-major float64 tensors and optional extra arrays
(optimizer moments), plus a human-readable JSON metadata sidecar.
"""

import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np

from src.autodiff import backend as B
from src.common.errors import CheckpointError
from src.networks.config import DeepBsdeConfig, MlpConfig, MscaleConfig
from src.networks.params import NetworkParams, init_params

logger = logging.getLogger("Checkpoint")

FORMAT_VERSION = 1

_CONFIG_TYPES = {
    "mlp": MlpConfig,
    "mscale": MscaleConfig,
    "deep_bsde": DeepBsdeConfig,
}


def canonical_json(payload: Dict[str, Any]) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def architecture_hash(params_or_arch: Union[NetworkParams, Dict[str, Any]]) -> str:
    """SHA-256 of the canonical architecture JSON."""
    arch = params_or_arch if isinstance(params_or_arch, dict) else params_or_arch.architecture()
    return hashlib.sha256(canonical_json(arch).encode("utf-8")).hexdigest()


def config_from_architecture(arch: Dict[str, Any]):
    kind = arch.get("kind")
    if kind not in _CONFIG_TYPES:
        raise CheckpointError(f"unknown architecture kind '{kind}'")
    return _CONFIG_TYPES[kind](**arch["config"])


def save_checkpoint(
        path: Union[str, Path],
        params: NetworkParams,
        metadata: Optional[Dict[str, Any]] = None,
        extras: Optional[Dict[str, np.ndarray]] = None,
) -> Path:
    """Write params (and extras) to path; metadata also goes to path.json."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    metadata = dict(metadata or {})
    arch = params.architecture()
    metadata["architecture_hash"] = architecture_hash(arch)

    arrays: Dict[str, np.ndarray] = {
        "format_version": np.array(FORMAT_VERSION),
        "architecture": np.array(canonical_json(arch)),
        "metadata": np.array(canonical_json(metadata)),
    }
    for i, tensor in enumerate(params.tensors()):
        arrays[f"tensor_{i:03d}"] = np.ascontiguousarray(B.to_numpy(tensor), dtype=np.float64)
    for key, value in (extras or {}).items():
        arrays[f"extra_{key}"] = np.ascontiguousarray(value, dtype=np.float64)

    try:
        with open(path, "wb") as handle:
            np.savez(handle, **arrays)
        path.with_suffix(path.suffix + ".json").write_text(json.dumps(metadata, indent=2, sort_keys=True))
    except OSError as exc:
        raise CheckpointError(f"cannot write checkpoint {path}: {exc}") from exc

    logger.debug(f"✓ Saved checkpoint {path} ({len(params.tensors())} tensors)")
    return path


def load_checkpoint(
        path: Union[str, Path],
        expected_hash: Optional[str] = None,
) -> Tuple[NetworkParams, Dict[str, Any], Dict[str, np.ndarray]]:
    """
    Read a checkpoint written by save_checkpoint.

    Returns:
        (params, metadata, extras)

    Raises:
        CheckpointError: Missing file, unknown format, shape mismatch or
            architecture hash different from expected_hash
    """
    path = Path(path)
    if not path.exists():
        raise CheckpointError(f"checkpoint not found: {path}")

    try:
        with np.load(path, allow_pickle=False) as archive:
            contents = {key: archive[key] for key in archive.files}
    except (OSError, ValueError) as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc

    version = int(contents.get("format_version", -1))
    if version != FORMAT_VERSION:
        raise CheckpointError(f"unsupported checkpoint format {version} in {path}")

    arch = json.loads(str(contents["architecture"]))
    metadata = json.loads(str(contents["metadata"]))
    actual_hash = architecture_hash(arch)
    if expected_hash is not None and expected_hash != actual_hash:
        raise CheckpointError(
            f"architecture mismatch: checkpoint {actual_hash[:12]} vs config {expected_hash[:12]}"
        )

    try:
        template = init_params(config_from_architecture(arch), seed=0)
    except ValueError as exc:
        raise CheckpointError(f"invalid architecture in {path}: {exc}") from exc

    names = sorted(k for k in contents if k.startswith("tensor_"))
    expected_shapes = [B.to_numpy(t).shape for t in template.tensors()]
    if len(names) != len(expected_shapes):
        raise CheckpointError(f"{path} holds {len(names)} tensors, architecture needs {len(expected_shapes)}")
    tensors = []
    for name, shape in zip(names, expected_shapes):
        if contents[name].shape != shape:
            raise CheckpointError(f"{name} has shape {contents[name].shape}, expected {shape}")
        tensors.append(contents[name])

    extras = {k[len("extra_"):]: v for k, v in contents.items() if k.startswith("extra_")}
    return template.with_tensors(tensors), metadata, extras
