"""
Problem Definition

Coefficients, terminal data and (optionally) the exact solution of a
quasilinear parabolic PDE in its forward-backward SDE form.

Batch conventions used by every callback:
    t: float, x: (M, d), y: (M,), z: (M, d)
    mu -> (M, d); phi, g, exact_u -> (M,); grad_g, exact_grad -> (M, d)
    sigma -> (M, d) diagonal representation when sigma_is_diagonal,
             otherwise (M, d, d)
Callbacks are written with src.autodiff.backend so they evaluate on numpy
arrays and on tape values alike.
"""

from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional

import numpy as np

from src.autodiff.backend import is_traced, to_numpy
from src.common.errors import AutodiffError


@dataclass(frozen=True)
class ProblemDefinition:
    """Immutable description of one FBSDE problem."""

    name: str
    dim: int
    horizon: float
    mu: Callable
    sigma: Callable
    phi: Callable
    g: Callable
    grad_g: Callable
    x0: np.ndarray
    is_decoupled: bool = True
    sigma_is_diagonal: bool = True
    exact_u: Optional[Callable] = None
    exact_grad: Optional[Callable] = None
    params: Dict[str, Any] = field(default_factory=dict)

    @property
    def has_exact_solution(self) -> bool:
        return self.exact_u is not None

    def diffusion_times(self, t: float, x, y, dw: np.ndarray):
        """sigma(t, x, y) applied to a batch of increments dw (M, d)."""
        sig = self.sigma(t, x, y)
        if self.sigma_is_diagonal:
            return sig * dw
        if is_traced(sig):
            raise AutodiffError("full-matrix diffusion is only supported on numeric states")
        return np.einsum("mij,mj->mi", to_numpy(sig), dw)

    def initial_states(self, m: int) -> np.ndarray:
        """The anchor state repeated for a batch of m paths."""
        return np.tile(self.x0, (m, 1))


def anchor_x0(d: int) -> np.ndarray:
    """(1, 0.5, 1, 0.5, ...) of length d."""
    return np.where(np.arange(d) % 2 == 0, 1.0, 0.5)


def scaled_diagonal(x, scale: float):
    """Diagonal diffusion scale * diag(x) in (M, d) representation."""
    return x * scale


def pde_residual(
        problem: ProblemDefinition,
        t: float,
        x: np.ndarray,
        h_t: float = 1e-5,
        h_x: float = 1e-4,
) -> float:
    """
    Residual u_t + 1/2 sum_i s_i^2 d_ii u - phi of the exact solution at (t, x).

    Derivatives by central differences; the diffusion contraction uses the
    diagonal representation of sigma (diag(x x^T) read as x_i^2).
    """
    if not problem.has_exact_solution:
        raise ValueError(f"problem {problem.name} has no exact solution")
    if not problem.sigma_is_diagonal:
        raise ValueError("residual check supports diagonal diffusion only")

    x = np.asarray(x, dtype=np.float64).reshape(1, -1)
    d = x.shape[1]
    u = problem.exact_u

    u_center = u(t, x)[0]
    u_t = (u(t + h_t, x)[0] - u(t - h_t, x)[0]) / (2.0 * h_t)

    shifts = np.eye(d) * h_x
    plus = u(t, x + shifts)
    minus = u(t, x - shifts)
    second = (plus - 2.0 * u_center + minus) / (h_x * h_x)

    s = problem.sigma(t, x, np.array([u_center]))[0]
    diffusion = 0.5 * float(np.sum(s * s * second))

    z = problem.exact_grad(t, x) if problem.exact_grad else ((plus - minus) / (2.0 * h_x))[None, :]
    phi = float(problem.phi(t, x, np.array([u_center]), z)[0])
    return u_t + diffusion - phi


def relative_pde_residual(problem: ProblemDefinition, t: float, x: np.ndarray) -> float:
    """|residual| / |phi| at one point."""
    x = np.asarray(x, dtype=np.float64).reshape(1, -1)
    u_center = problem.exact_u(t, x)
    phi = float(problem.phi(t, x, u_center, problem.exact_grad(t, x))[0])
    return abs(pde_residual(problem, t, x)) / max(abs(phi), 1e-300)


__all__ = [
    "ProblemDefinition",
    "anchor_x0",
    "scaled_diagonal",
    "pde_residual",
    "relative_pde_residual",
]
