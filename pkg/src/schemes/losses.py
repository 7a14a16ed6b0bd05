"""
Differentiable losses for Schemes 1, 2 and 3.

Each loss rolls the discretized FBSDE along a batch of increments with the
network supplying Y and/or Z, and returns a LossBreakdown recorded on the
tape the adapter is bound to.

Decoupled problems take a stacked path: X is rolled numerically first and
the network runs once over all (t_n, X_n) rows. Coupled problems roll station
by station on the tape. Both give the same loss up to summation order.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from src.adapters.base_adapter import SolutionAdapter
from src.autodiff import backend as B
from src.autodiff import ops
from src.autodiff.tape import AdTape, AdValue
from src.common.errors import NumericAbort
from src.problems.definition import ProblemDefinition
from src.schemes.config import LossNormalization, LossRecord, Scheme3Diffusion, SchemeConfig, SchemeName
from src.simulate.euler import euler_x_step, euler_y_step, roll_forward
from src.simulate.grid import TimeGrid

logger = logging.getLogger("Schemes")


@dataclass
class LossBreakdown:
    """total = pathwise + beta1 * terminal_value + beta2 * terminal_grad."""

    pathwise: AdValue
    terminal_value: AdValue
    terminal_grad: AdValue
    total: AdValue
    beta1: float
    beta2: float
    y0: float = float("nan")

    def values(self) -> LossRecord:
        return LossRecord(
            pathwise=self.pathwise.item(),
            terminal_value=self.terminal_value.item(),
            terminal_grad=self.terminal_grad.item(),
            total=self.total.item(),
            y0=self.y0,
        )


# ==================== HELPERS ====================

def _check_finite(value, quantity: str, station: Optional[int] = None) -> None:
    data = B.to_numpy(value)
    if np.all(np.isfinite(data)):
        return
    bad = np.argwhere(~np.isfinite(data.reshape(data.shape[0], -1))) if data.ndim else None
    raise NumericAbort(
        "non-finite value in loss assembly",
        path=None if bad is None else int(bad[0, 0]),
        station=station,
        quantity=quantity,
    )


def _sum_squares(value) -> AdValue:
    return ops.total_sum(ops.square(ops.lift(value)))


def _assemble(
        config: SchemeConfig,
        pathwise_sum: AdValue,
        y_terminal,
        z_terminal,
        x_terminal,
        problem: ProblemDefinition,
        y0: float,
) -> LossBreakdown:
    m, n = config.batch, config.n_steps
    value_sum = _sum_squares(y_terminal - problem.g(x_terminal))
    grad_sum = _sum_squares(z_terminal - problem.grad_g(x_terminal))

    if config.loss_normalization == LossNormalization.SUMMED:
        pathwise, terminal_value, terminal_grad = pathwise_sum, value_sum, grad_sum
        beta1, beta2 = 1.0, 1.0
    else:
        pathwise = ops.scale(pathwise_sum, 1.0 / (m * n))
        terminal_value = ops.scale(value_sum, 1.0 / m)
        terminal_grad = ops.scale(grad_sum, 1.0 / m)
        beta1, beta2 = config.beta1, config.beta2

    total = ops.add(ops.add(pathwise, ops.scale(terminal_value, beta1)), ops.scale(terminal_grad, beta2))
    _check_finite(total, "loss")
    return LossBreakdown(pathwise, terminal_value, terminal_grad, total, beta1, beta2, y0)


def _check_increments(config: SchemeConfig, problem: ProblemDefinition, dw: np.ndarray) -> TimeGrid:
    expected = (config.batch, config.n_steps, problem.dim)
    if dw.shape != expected:
        raise ValueError(f"increments have shape {dw.shape}, expected {expected}")
    return config.grid(problem.horizon)


def _start(problem: ProblemDefinition, m: int, x0) -> np.ndarray:
    if x0 is None:
        return problem.initial_states(m)
    x0 = np.asarray(x0, dtype=np.float64)
    return np.tile(x0, (m, 1)) if x0.ndim == 1 else x0


def _mean_value(u) -> float:
    return float(np.mean(B.to_numpy(u)))


# ==================== STACKED (DECOUPLED) ====================

class _StackedEvaluation:
    """Network values and gradients at every (t_n, X_n), station-major."""

    def __init__(self, adapter: SolutionAdapter, tape: AdTape, grid: TimeGrid, x: np.ndarray):
        m, n1, d = x.shape
        self.m = m
        rows = x.transpose(1, 0, 2).reshape(n1 * m, d)
        times = np.repeat(grid.stations, m)
        self.u, self.z = adapter.value_and_grad(tape, times, rows)
        _check_finite(self.u, "u")

    def at(self, n: int) -> Tuple[AdValue, AdValue]:
        start, stop = n * self.m, (n + 1) * self.m
        return ops.take_rows(self.u, start, stop), ops.take_rows(self.z, start, stop)


def _scheme1_stacked(adapter, tape, problem, grid, x, dw):
    ev = _StackedEvaluation(adapter, tape, grid, x)
    stations = grid.stations
    y, z = ev.at(0)
    y0 = _mean_value(y)
    pathwise = ops.constant(0.0)
    for n in range(grid.n_steps):
        y_star = euler_y_step(problem, stations[n], x[:, n], y, z, dw[:, n], grid.dt, station=n)
        y, z = ev.at(n + 1)
        pathwise = ops.add(pathwise, _sum_squares(y - y_star))
    return pathwise, y, z, x[:, -1], y0


def _scheme2_stacked(adapter, tape, problem, grid, x, dw):
    ev = _StackedEvaluation(adapter, tape, grid, x)
    stations = grid.stations
    y_ref, z = ev.at(0)
    y = y_ref
    y0 = _mean_value(y_ref)
    pathwise = ops.constant(0.0)
    for n in range(grid.n_steps):
        y = euler_y_step(problem, stations[n], x[:, n], y, z, dw[:, n], grid.dt, station=n)
        y_ref, z = ev.at(n + 1)
        pathwise = ops.add(pathwise, _sum_squares(y - y_ref))
    return pathwise, y_ref, z, x[:, -1], y0


# ==================== STEPWISE (GENERAL) ====================

def _scheme1_stepwise(adapter, tape, problem, grid, x, dw):
    stations = grid.stations
    y, z = adapter.value_and_grad(tape, stations[0], x)
    y0 = _mean_value(y)
    pathwise = ops.constant(0.0)
    for n in range(grid.n_steps):
        t = stations[n]
        y_star = euler_y_step(problem, t, x, y, z, dw[:, n], grid.dt, station=n)
        x = euler_x_step(problem, t, x, y, z, dw[:, n], grid.dt, station=n)
        y, z = adapter.value_and_grad(tape, stations[n + 1], x)
        _check_finite(y, "u", n + 1)
        pathwise = ops.add(pathwise, _sum_squares(y - y_star))
    return pathwise, y, z, x, y0


def _scheme2_stepwise(adapter, tape, problem, grid, x, dw):
    stations = grid.stations
    y, z = adapter.value_and_grad(tape, stations[0], x)
    y0 = _mean_value(y)
    y_ref = y
    pathwise = ops.constant(0.0)
    for n in range(grid.n_steps):
        t = stations[n]
        y_next = euler_y_step(problem, t, x, y, z, dw[:, n], grid.dt, station=n)
        x = euler_x_step(problem, t, x, y, z, dw[:, n], grid.dt, station=n)
        y = y_next
        y_ref, z = adapter.value_and_grad(tape, stations[n + 1], x)
        _check_finite(y_ref, "u", n + 1)
        pathwise = ops.add(pathwise, _sum_squares(y - y_ref))
    return pathwise, y_ref, z, x, y0


def _scheme3_stepwise(adapter, tape, problem, grid, x, dw, diffusion: Scheme3Diffusion):
    stations = grid.stations
    y1, z1 = adapter.value_and_grad(tape, stations[0], x)
    y0 = _mean_value(y1)
    x1, x2, y2, z2 = x, x, y1, z1
    pathwise = ops.constant(0.0)
    for n in range(grid.n_steps):
        t, dt, dw_n = stations[n], grid.dt, dw[:, n]
        x1_next = euler_x_step(problem, t, x1, y1, z1, dw_n, dt, station=n)

        if diffusion == Scheme3Diffusion.AS_PRINTED:
            noise = problem.diffusion_times(t, x1, y1, dw_n)
        else:
            noise = problem.diffusion_times(t, x2, y2, dw_n)
        x2_next = x2 + problem.mu(t, x2, y2, z2) * dt + noise
        _check_finite(x2_next, "X2", n + 1)
        y2 = euler_y_step(problem, t, x2, y2, z2, dw_n, dt, station=n)

        x1, x2 = x1_next, x2_next
        y1, z1 = adapter.value_and_grad(tape, stations[n + 1], x1)
        _, z2 = adapter.value_and_grad(tape, stations[n + 1], x2)
        _check_finite(y1, "u", n + 1)
        pathwise = ops.add(pathwise, _sum_squares(y1 - y2))
    return pathwise, y1, z1, x1, y0


# ==================== PUBLIC LOSSES ====================

def _use_stacked(problem: ProblemDefinition, stacked: Optional[bool]) -> bool:
    if stacked is None:
        return problem.is_decoupled
    if stacked and not problem.is_decoupled:
        raise ValueError("stacked evaluation needs a decoupled problem")
    return stacked


def scheme1_loss(adapter: SolutionAdapter, tape: AdTape, problem: ProblemDefinition, config: SchemeConfig,
                 dw: np.ndarray, x0=None, stacked: Optional[bool] = None) -> LossBreakdown:
    """Network-driven rollout against the one-step Euler reference Y*."""
    grid = _check_increments(config, problem, dw)
    start = _start(problem, config.batch, x0)
    if _use_stacked(problem, stacked):
        x = roll_forward(problem, start, dw, grid)
        parts = _scheme1_stacked(adapter, tape, problem, grid, x, dw)
    else:
        parts = _scheme1_stepwise(adapter, tape, problem, grid, start, dw)
    pathwise, y_n, z_n, x_n, y0 = parts
    return _assemble(config, pathwise, y_n, z_n, x_n, problem, y0)


def scheme2_loss(adapter: SolutionAdapter, tape: AdTape, problem: ProblemDefinition, config: SchemeConfig,
                 dw: np.ndarray, x0=None, stacked: Optional[bool] = None) -> LossBreakdown:
    """Euler-rolled Y against the network value u(t_n, X_n)."""
    grid = _check_increments(config, problem, dw)
    start = _start(problem, config.batch, x0)
    if _use_stacked(problem, stacked):
        x = roll_forward(problem, start, dw, grid)
        parts = _scheme2_stacked(adapter, tape, problem, grid, x, dw)
    else:
        parts = _scheme2_stepwise(adapter, tape, problem, grid, start, dw)
    pathwise, y_ref, z_n, x_n, y0 = parts
    return _assemble(config, pathwise, y_ref, z_n, x_n, problem, y0)


def scheme3_loss(adapter: SolutionAdapter, tape: AdTape, problem: ProblemDefinition, config: SchemeConfig,
                 dw: np.ndarray, x0=None, stacked: Optional[bool] = None) -> LossBreakdown:
    """
    Two Euler branches sharing dW: branch (1) reads Y, Z from the network,
    branch (2) rolls Y by Euler. For decoupled problems the branches share X,
    so the stacked path coincides with Scheme 2's.
    """
    grid = _check_increments(config, problem, dw)
    start = _start(problem, config.batch, x0)
    if _use_stacked(problem, stacked):
        x = roll_forward(problem, start, dw, grid)
        parts = _scheme2_stacked(adapter, tape, problem, grid, x, dw)
    else:
        parts = _scheme3_stepwise(adapter, tape, problem, grid, start, dw, config.scheme3_diffusion)
    pathwise, y_n, z_n, x_n, y0 = parts
    return _assemble(config, pathwise, y_n, z_n, x_n, problem, y0)


LOSSES = {
    SchemeName.S1: scheme1_loss,
    SchemeName.S2: scheme2_loss,
    SchemeName.S3: scheme3_loss,
}


def scheme_loss(adapter: SolutionAdapter, tape: AdTape, problem: ProblemDefinition, config: SchemeConfig,
                dw: np.ndarray, x0=None, stacked: Optional[bool] = None) -> LossBreakdown:
    """Dispatch on config.scheme (Deep BSDE included)."""
    if config.scheme == SchemeName.DEEP_BSDE:
        from src.schemes.deep_bsde import deep_bsde_breakdown
        return deep_bsde_breakdown(adapter, tape, problem, config, dw, x0=x0)
    return LOSSES[config.scheme](adapter, tape, problem, config, dw, x0=x0, stacked=stacked)


__all__: List[str] = [
    "LossBreakdown",
    "scheme1_loss",
    "scheme2_loss",
    "scheme3_loss",
    "scheme_loss",
]
