"""
Black-Scholes-Barenblatt problems.

make_bsb: u_t + 1/2 Tr[sigma^2 diag(x x^T) D^2 u] = r (u - Du . x), u(T, x) = |x|^2
make_osc_bsb: the same operator with a time-oscillatory factor in g and an
extra source term in the driver.
"""

import math
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.autodiff import backend as B
from src.problems.definition import ProblemDefinition, anchor_x0, scaled_diagonal


class BsbParams(BaseModel):
    """Black-Scholes-Barenblatt parameters (published benchmark defaults)."""

    model_config = ConfigDict(extra="forbid")

    r: float = Field(default=0.05, ge=0.0, description="Interest rate")
    sigma_scalar: float = Field(default=0.4, gt=0.0, description="Volatility")
    d: int = Field(default=100, ge=1, description="Spatial dimension")
    T: float = Field(default=1.0, gt=0.0, description="Horizon")
    x0: Optional[List[float]] = Field(
        default=None,
        description="Anchor initial state; defaults to (1, 0.5, 1, 0.5, ...)"
    )

    @model_validator(mode="after")
    def _check_x0(self) -> "BsbParams":
        if self.x0 is not None and len(self.x0) != self.d:
            raise ValueError(f"x0 has length {len(self.x0)}, expected d={self.d}")
        return self

    def anchor(self) -> np.ndarray:
        return np.asarray(self.x0, dtype=np.float64) if self.x0 is not None else anchor_x0(self.d)


class OscBsbParams(BsbParams):
    """BSB parameters plus the oscillation amplitude / frequencies."""

    alpha: float = Field(default=0.025, description="Oscillation amplitude")
    beta: float = Field(default=0.25, description="Spatial frequency on S_1")
    gamma: float = Field(default=32.0, description="Temporal frequency")

    @field_validator("alpha", "beta", "gamma")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("must be finite")
        return value


def power_sums(x, up_to: int = 3) -> Tuple:
    """(S_1, ..., S_up_to) with S_j = sum_i x_i^j, per row of x."""
    if not B.is_traced(x) and np.ndim(x) == 1:
        return tuple(float(s[0]) for s in power_sums(np.asarray(x, dtype=np.float64)[None, :], up_to))
    sums = []
    power = x
    for j in range(1, up_to + 1):
        if j > 1:
            power = power * x
        sums.append(B.row_sum(power))
    return tuple(sums)


def _growth(params: BsbParams, t: float) -> float:
    return math.exp((params.r + params.sigma_scalar ** 2) * (params.T - t))


def make_bsb(params: BsbParams) -> ProblemDefinition:
    """The BSB equation with g(x) = |x|^2 and its closed-form solution."""
    r = params.r
    sig = params.sigma_scalar

    def mu(t, x, y, z):
        return np.zeros(B.to_numpy(x).shape)

    def sigma(t, x, y):
        return scaled_diagonal(x, sig)

    def phi(t, x, y, z):
        return r * (y - B.row_dot(z, x))

    def g(x):
        return B.row_sum(B.square(x))

    def grad_g(x):
        return 2.0 * x

    def exact_u(t, x):
        return _growth(params, t) * np.sum(x * x, axis=1)

    def exact_grad(t, x):
        return _growth(params, t) * 2.0 * x

    return ProblemDefinition(
        name="bsb",
        dim=params.d,
        horizon=params.T,
        mu=mu,
        sigma=sigma,
        phi=phi,
        g=g,
        grad_g=grad_g,
        x0=params.anchor(),
        is_decoupled=True,
        sigma_is_diagonal=True,
        exact_u=exact_u,
        exact_grad=exact_grad,
        params=params.model_dump(),
    )


def oscillation_source(params: OscBsbParams, t: float, x):
    """P(t, x) of the oscillatory driver."""
    r, sig = params.r, params.sigma_scalar
    beta, gamma = params.beta, params.gamma
    s1, s2, s3 = power_sums(x, 3)
    phase = beta * s1 - gamma * t
    amplitude = r * beta * s1 * s2 - gamma * s2 + 2.0 * sig ** 2 * beta * s3
    return amplitude * B.cos(phase) - (0.5 * sig ** 2 * beta ** 2) * (s2 * s2) * B.sin(phase)


def make_osc_bsb(params: OscBsbParams) -> ProblemDefinition:
    """
    BSB with a temporal oscillation.

    g(x) = |x|^2 (1 + alpha sin(beta S_1 - gamma T)),
    phi = r (u - Du . x) + alpha e^{(r + sigma^2)(T - t)} P(t, x).

    The diffusion keeps sigma diag(x) as in the FBSDE; the stated exact
    solution satisfies the diag(x x^T) operator, not the bare Tr[sigma^2 D^2 u].
    """
    r = params.r
    sig = params.sigma_scalar
    alpha, beta, gamma = params.alpha, params.beta, params.gamma
    horizon = params.T
    d = params.d

    def mu(t, x, y, z):
        return np.zeros(B.to_numpy(x).shape)

    def sigma(t, x, y):
        return scaled_diagonal(x, sig)

    def phi(t, x, y, z):
        return r * (y - B.row_dot(z, x)) + (alpha * _growth(params, t)) * oscillation_source(params, t, x)

    def g(x):
        s1, s2 = power_sums(x, 2)
        return s2 * (1.0 + alpha * B.sin(beta * s1 - gamma * horizon))

    def grad_g(x):
        s1, s2 = power_sums(x, 2)
        phase = beta * s1 - gamma * horizon
        radial = B.mul_rows(2.0 * x, 1.0 + alpha * B.sin(phase))
        return radial + B.expand_cols((alpha * beta) * (s2 * B.cos(phase)), d)

    def exact_u(t, x):
        s1, s2 = power_sums(x, 2)
        return _growth(params, t) * s2 * (1.0 + alpha * np.sin(beta * s1 - gamma * t))

    def exact_grad(t, x):
        s1, s2 = power_sums(x, 2)
        phase = beta * s1 - gamma * t
        radial = 2.0 * x * (1.0 + alpha * np.sin(phase))[:, None]
        shift = (alpha * beta * s2 * np.cos(phase))[:, None]
        return _growth(params, t) * (radial + shift)

    return ProblemDefinition(
        name="bsb-osc",
        dim=d,
        horizon=horizon,
        mu=mu,
        sigma=sigma,
        phi=phi,
        g=g,
        grad_g=grad_g,
        x0=params.anchor(),
        is_decoupled=True,
        sigma_is_diagonal=True,
        exact_u=exact_u,
        exact_grad=exact_grad,
        params=params.model_dump(),
    )
