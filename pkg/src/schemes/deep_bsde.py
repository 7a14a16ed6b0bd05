"""
Deep BSDE loss.

Y_0 and Z_0 are trainable, Z_n for 1 <= n < N comes from the n-th gradient
sub-network applied to X_n, and X, Y are rolled forward by Euler-Maruyama.
The loss is the Monte-Carlo mean of |Y_N - g(X_N)|^2.
"""

from typing import Optional

import numpy as np

from src.adapters.network_adapter import DeepBsdeAdapter
from src.autodiff import ops
from src.autodiff.tape import AdTape, AdValue
from src.common.errors import ConfigError, NumericAbort
from src.networks.params import DeepBsdeParams
from src.problems.definition import ProblemDefinition
from src.schemes.config import SchemeConfig
from src.schemes.losses import LossBreakdown, _check_increments, _start
from src.simulate.euler import euler_x_step, euler_y_step


def deep_bsde_loss(params: DeepBsdeParams, problem: ProblemDefinition, config: SchemeConfig,
                   dw: np.ndarray, x0=None) -> AdValue:
    """
    Scalar loss for a parameter set (bound to a tape or numeric).
    """
    if params.config.n_steps != config.n_steps or params.config.dim != problem.dim:
        raise ConfigError(
            f"model built for N={params.config.n_steps}, d={params.config.dim}; "
            f"run has N={config.n_steps}, d={problem.dim}"
        )
    grid = _check_increments(config, problem, dw)
    m = config.batch
    stations = grid.stations

    x = _start(problem, m, x0)
    y = ops.fill(ops.lift(params.y0), (m,))
    z = ops.broadcast_rows(ops.lift(params.z0), m)
    for n in range(grid.n_steps):
        t = stations[n]
        y_next = euler_y_step(problem, t, x, y, z, dw[:, n], grid.dt, station=n)
        x = euler_x_step(problem, t, x, y, z, dw[:, n], grid.dt, station=n)
        y = y_next
        if n + 1 < grid.n_steps:
            z = ops.lift(params.subnets[n].forward(x))

    loss = ops.mean(ops.square(y - problem.g(x)))
    if not np.isfinite(loss.data):
        raise NumericAbort("non-finite Deep BSDE loss", station=grid.n_steps, quantity="loss")
    return loss


def deep_bsde_breakdown(adapter: DeepBsdeAdapter, tape: AdTape, problem: ProblemDefinition,
                        config: SchemeConfig, dw: np.ndarray, x0=None) -> LossBreakdown:
    """The Deep BSDE loss in breakdown form (all weight on the terminal value)."""
    if not isinstance(adapter, DeepBsdeAdapter):
        raise ConfigError("scheme deep_bsde needs a Deep BSDE model", field="scheme")
    params = adapter.bound_params(tape)
    loss = deep_bsde_loss(params, problem, config, dw, x0=x0)
    zero = ops.constant(0.0)
    return LossBreakdown(
        pathwise=zero,
        terminal_value=loss,
        terminal_grad=zero,
        total=loss,
        beta1=1.0,
        beta2=0.0,
        y0=float(np.asarray(params.y0.data if isinstance(params.y0, AdValue) else params.y0)),
    )
