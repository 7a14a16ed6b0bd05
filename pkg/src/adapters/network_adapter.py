"""
Network Adapters

Wrap trained parameter sets (plain, multiscale, Deep BSDE) behind the
SolutionAdapter interface.
"""

from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.adapters.base_adapter import SolutionAdapter
from src.autodiff import ops
from src.autodiff.tape import AdTape, AdValue
from src.common.errors import ConfigError
from src.networks.checkpoint import architecture_hash, load_checkpoint, save_checkpoint
from src.networks.forward import batch_value, predict, value_and_spatial_grad
from src.networks.params import DeepBsdeParams, MlpParams, MscaleParams, bind_params, parameter_count


class TrainableAdapter(SolutionAdapter):
    """Shared plumbing for adapters holding a parameter set."""

    def __init__(self, params, config: Optional[Dict[str, Any]] = None):
        super().__init__(config)
        self.params = params
        self._bound = None

    def parameters(self) -> List[np.ndarray]:
        return [np.asarray(t, dtype=np.float64) for t in self.params.tensors()]

    def with_parameters(self, arrays: Sequence[np.ndarray]):
        current = self.params.tensors()
        if len(arrays) != len(current):
            raise ConfigError(f"expected {len(current)} tensors, got {len(arrays)}")
        for new, old in zip(arrays, current):
            if np.shape(new) != np.shape(old):
                raise ConfigError(f"tensor shape {np.shape(new)} does not match {np.shape(old)}")
        return type(self)(self.params.with_tensors([np.asarray(a, dtype=np.float64) for a in arrays]), self.config)

    def bind(self, tape: AdTape) -> List[AdValue]:
        self._bound, leaves = bind_params(self.params, tape)
        self._tape = tape
        return leaves

    def _params_for(self, tape: AdTape):
        return self._bound if self._bound is not None and self._tape is tape else self.params

    @property
    def architecture_hash(self) -> str:
        return architecture_hash(self.params)

    @property
    def parameter_count(self) -> int:
        return parameter_count(self.params)

    def save(self, path: Union[str, Path], metadata: Optional[Dict[str, Any]] = None,
             extras: Optional[Dict[str, np.ndarray]] = None) -> Path:
        return save_checkpoint(path, self.params, metadata, extras)


class NetworkSolutionAdapter(TrainableAdapter):
    """u_theta(t, x) from a plain or multiscale network."""

    def __init__(self, params: Union[MlpParams, MscaleParams], config: Optional[Dict[str, Any]] = None):
        if not isinstance(params, (MlpParams, MscaleParams)):
            raise ConfigError(f"network adapter needs MlpParams or MscaleParams, got {type(params).__name__}")
        super().__init__(params, config)

    @property
    def dim(self) -> int:
        return self.params.config.input_dim - 1

    def value_and_grad(self, tape: AdTape, t, x) -> Tuple[AdValue, AdValue]:
        self._check_batch(x)
        return value_and_spatial_grad(self._params_for(tape), tape, t, x)

    def value(self, tape: AdTape, t, x) -> AdValue:
        """u only, on tape (no gradient sweep)."""
        self._check_batch(x)
        return ops.lift(batch_value(self._params_for(tape), t, x))

    def predict(self, t, x: np.ndarray) -> np.ndarray:
        return predict(self.params, t, x)


class DeepBsdeAdapter(TrainableAdapter):
    """
    Deep BSDE model: trainable (Y_0, Z_0) and per-station gradient networks.

    As a solution it is only defined at t = 0, where u = Y_0 and z = Z_0.
    """

    def __init__(self, params: DeepBsdeParams, config: Optional[Dict[str, Any]] = None):
        if not isinstance(params, DeepBsdeParams):
            raise ConfigError(f"deep BSDE adapter needs DeepBsdeParams, got {type(params).__name__}")
        super().__init__(params, config)

    @property
    def dim(self) -> int:
        return self.params.config.dim

    def bound_params(self, tape: AdTape) -> DeepBsdeParams:
        return self._params_for(tape)

    def value_and_grad(self, tape: AdTape, t, x) -> Tuple[AdValue, AdValue]:
        self._check_batch(x)
        self._require_initial_time(t)
        params = self._params_for(tape)
        m = np.shape(x)[0]
        y0, z0 = ops.lift(params.y0), ops.lift(params.z0)
        return ops.fill(y0, (m,)), ops.broadcast_rows(z0, m)

    def predict(self, t, x: np.ndarray) -> np.ndarray:
        self._check_batch(x)
        self._require_initial_time(t)
        return np.full(np.shape(x)[0], float(self.params.y0))

    @staticmethod
    def _require_initial_time(t) -> None:
        if np.any(np.asarray(t) != 0.0):
            raise ConfigError("the Deep BSDE model only represents the solution at t = 0", field="t")


def load_adapter(path: Union[str, Path], expected_hash: Optional[str] = None) -> Tuple[TrainableAdapter, Dict[str, Any], Dict[str, np.ndarray]]:
    """Load a checkpoint and wrap it in the matching adapter."""
    params, metadata, extras = load_checkpoint(path, expected_hash)
    if isinstance(params, DeepBsdeParams):
        return DeepBsdeAdapter(params), metadata, extras
    return NetworkSolutionAdapter(params), metadata, extras
