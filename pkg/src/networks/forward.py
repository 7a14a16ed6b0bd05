"""
Network evaluation: values and spatial gradients of u(t, x).

Batched evaluation over rows (t, x) is the primary path; the single-point
functions are views on it.
"""

from typing import Tuple, Union

import numpy as np

from src.autodiff import backend as B
from src.autodiff import ops
from src.autodiff.grad import grad_wrt_inputs
from src.autodiff.tape import AdTape, AdValue
from src.common.errors import AutodiffError
from src.networks.params import MlpParams, MscaleParams

SolutionParams = Union[MlpParams, MscaleParams]


def _input_dim(params: SolutionParams) -> int:
    return params.config.input_dim


def network_inputs(t, x):
    """
    Rows (t, x_1, ..., x_d) for a batch x of shape (B, d).

    t is a scalar or a (B,) vector of times.
    """
    rows = B.to_numpy(x).shape[0]
    times = np.broadcast_to(np.asarray(t, dtype=np.float64), (rows,)).reshape(rows, 1).copy()
    return B.concat_cols(times, x)


def _check_dim(params: SolutionParams, x) -> None:
    d = B.to_numpy(x).shape[-1]
    if d + 1 != _input_dim(params):
        raise AutodiffError(f"state has dimension {d}, network expects d={_input_dim(params) - 1}")


def batch_value(params: SolutionParams, t, x):
    """u(t, x) for a batch: (B, d) -> (B,)."""
    _check_dim(params, x)
    out = params.forward(network_inputs(t, x))
    if B.is_traced(out):
        return ops.reshape(out, (out.shape[0],))
    return out[:, 0].copy()


def value_and_spatial_grad(params: SolutionParams, tape: AdTape, t, x) -> Tuple[AdValue, AdValue]:
    """
    (u, z) with u of shape (B,) and z = du/dx of shape (B, d), both on tape.

    The time component of the input gradient is discarded. When params are
    bound to the tape, u and z stay differentiable with respect to them.
    """
    _check_dim(params, x)
    d = _input_dim(params) - 1
    inputs = tape.watch(network_inputs(t, x))
    out = params.forward(inputs)
    u = ops.reshape(out, (out.shape[0],))
    grad = grad_wrt_inputs(ops.total_sum(u), inputs)
    return u, ops.take_cols(grad, 1, d + 1)


def predict(params: SolutionParams, t, x: np.ndarray) -> np.ndarray:
    """Numeric u(t, x) for a batch, no tape."""
    return B.to_numpy(batch_value(params, t, np.asarray(x, dtype=np.float64)))


def predict_with_grad(params: SolutionParams, t, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Numeric (u, z) for a batch via a throwaway tape."""
    tape = AdTape()
    u, z = value_and_spatial_grad(params, tape, t, np.asarray(x, dtype=np.float64))
    return u.data.copy(), z.data.copy()


# ==================== SINGLE POINT ====================

def _as_row(x):
    if B.is_traced(x):
        return ops.reshape(x, (1, x.shape[0]))
    return np.asarray(x, dtype=np.float64).reshape(1, -1)


def mlp_eval(params: MlpParams, t: float, x) -> AdValue:
    """u(t, x) at one point as a scalar AdValue."""
    return ops.reshape(ops.lift(batch_value(params, t, _as_row(x))), ())


def mlp_eval_with_spatial_grad(params: MlpParams, t: float, x, tape: AdTape = None) -> Tuple[AdValue, AdValue]:
    """(u, z) at one point; z has shape (d,)."""
    tape = tape if tape is not None else _tape_of(params, x)
    u, z = value_and_spatial_grad(params, tape, t, _as_row(x))
    return ops.reshape(u, ()), ops.reshape(z, (z.shape[1],))


def mscale_eval(params: MscaleParams, t: float, x) -> AdValue:
    """Sum_i W_i f_i(alpha_i o (t, x)) + b at one point."""
    return ops.reshape(ops.lift(batch_value(params, t, _as_row(x))), ())


def _tape_of(params: SolutionParams, x) -> AdTape:
    for value in list(params.tensors()) + [x]:
        if isinstance(value, AdValue) and not value.is_constant:
            return value.tape
    return AdTape()
