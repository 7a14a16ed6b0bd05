"""
Adam optimizer over lists of numpy tensors.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np

from src.common.errors import CheckpointError, ConfigError

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPSILON = 1e-8


@dataclass
class AdamState:
    """First / second moments per tensor and the number of updates taken."""

    first_moment: List[np.ndarray]
    second_moment: List[np.ndarray]
    step: int = 0
    beta1: float = ADAM_BETA1
    beta2: float = ADAM_BETA2
    epsilon: float = ADAM_EPSILON

    @classmethod
    def zeros_like(cls, params: Sequence[np.ndarray]) -> "AdamState":
        return cls([np.zeros_like(p) for p in params], [np.zeros_like(p) for p in params])

    def hyperparameters(self) -> Dict[str, float]:
        return {"beta1": self.beta1, "beta2": self.beta2, "epsilon": self.epsilon}

    # ==================== CHECKPOINT EXTRAS ====================

    def to_arrays(self) -> Dict[str, np.ndarray]:
        arrays = {"adam_step": np.array(float(self.step))}
        for i, (m, v) in enumerate(zip(self.first_moment, self.second_moment)):
            arrays[f"adam_m_{i:03d}"] = m
            arrays[f"adam_v_{i:03d}"] = v
        return arrays

    @classmethod
    def from_arrays(cls, arrays: Dict[str, np.ndarray], params: Sequence[np.ndarray]) -> "AdamState":
        if "adam_step" not in arrays:
            raise CheckpointError("checkpoint carries no optimizer state")
        first, second = [], []
        for i, p in enumerate(params):
            try:
                m, v = arrays[f"adam_m_{i:03d}"], arrays[f"adam_v_{i:03d}"]
            except KeyError as exc:
                raise CheckpointError(f"optimizer moment {i} missing from checkpoint") from exc
            if m.shape != p.shape or v.shape != p.shape:
                raise CheckpointError(f"optimizer moment {i} has shape {m.shape}, parameter {p.shape}")
            first.append(m.copy())
            second.append(v.copy())
        return cls(first, second, int(arrays["adam_step"]))


def adam_step(
        params: Sequence[np.ndarray],
        grads: Sequence[np.ndarray],
        state: AdamState,
        lr: float,
) -> Tuple[List[np.ndarray], AdamState]:
    """
    One bias-corrected Adam update.

    Returns new parameter arrays and a new state; inputs are not modified.
    """
    if len(params) != len(grads) or len(params) != len(state.first_moment):
        raise ConfigError(
            f"{len(params)} parameters, {len(grads)} gradients, {len(state.first_moment)} moments"
        )
    b1, b2, eps = state.beta1, state.beta2, state.epsilon
    step = state.step + 1
    correction1 = 1.0 - b1 ** step
    correction2 = 1.0 - b2 ** step

    new_params, first, second = [], [], []
    for p, g, m, v in zip(params, grads, state.first_moment, state.second_moment):
        if p.shape != g.shape or p.shape != m.shape:
            raise ConfigError(f"shape mismatch: parameter {p.shape}, gradient {g.shape}, moment {m.shape}")
        m_new = b1 * m + (1.0 - b1) * g
        v_new = b2 * v + (1.0 - b2) * g * g
        m_hat = m_new / correction1
        v_hat = v_new / correction2
        new_params.append(p - lr * m_hat / (np.sqrt(v_hat) + eps))
        first.append(m_new)
        second.append(v_new)

    return new_params, AdamState(first, second, step, b1, b2, eps)
