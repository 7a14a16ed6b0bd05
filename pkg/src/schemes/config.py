"""
Scheme configuration and loss records.
"""

from enum import Enum
from typing import ClassVar, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.simulate.grid import TimeGrid


class SchemeName(str, Enum):
    """Training algorithm."""
    DEEP_BSDE = "deep_bsde"
    S1 = "s1"
    S2 = "s2"
    S3 = "s3"


class LossNormalization(str, Enum):
    """
    AVERAGED: 1/(MN) pathwise term, 1/M terminal terms, beta-weighted.
    SUMMED: plain sums over paths and stations, unit terminal weights.
    """
    AVERAGED = "averaged"
    SUMMED = "summed"


class Scheme3Diffusion(str, Enum):
    """Arguments of the diffusion in the second branch's X update."""
    AS_PRINTED = "as_printed"
    BRANCH2 = "branch2"


class SchemeConfig(BaseModel):
    """Everything a loss needs besides the problem and the increments."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    scheme: SchemeName = Field(default=SchemeName.S2, description="deep_bsde | s1 | s2 | s3")
    problem: str = Field(default="bsb", description="Problem preset the scheme is trained on")
    n_steps: int = Field(default=48, ge=1, description="Training time steps N")
    batch: int = Field(default=100, ge=1, description="Paths per step M")
    beta1: float = Field(default=0.02, ge=0.0, description="Terminal value penalty")
    beta2: float = Field(default=0.02, ge=0.0, description="Terminal gradient penalty")
    loss_normalization: LossNormalization = Field(default=LossNormalization.AVERAGED)
    scheme3_diffusion: Scheme3Diffusion = Field(default=Scheme3Diffusion.AS_PRINTED)
    noise_steps: Optional[int] = Field(
        default=None,
        description="Grid on which increments are drawn before aggregation to n_steps "
                    "(shared across runs with different N)"
    )

    @model_validator(mode="after")
    def _check_noise_grid(self) -> "SchemeConfig":
        if self.noise_steps is not None and self.noise_steps % self.n_steps != 0:
            raise ValueError(f"noise_steps={self.noise_steps} is not a multiple of n_steps={self.n_steps}")
        return self

    @property
    def sampling_steps(self) -> int:
        return self.noise_steps or self.n_steps

    def grid(self, horizon: float) -> TimeGrid:
        return TimeGrid(n_steps=self.n_steps, horizon=horizon)

    def sampling_grid(self, horizon: float) -> TimeGrid:
        return TimeGrid(n_steps=self.sampling_steps, horizon=horizon)


class LossRecord(BaseModel):
    """One row of the loss log."""

    step: int = Field(default=0, ge=0)
    lr: float = Field(default=0.0)
    pathwise: float
    terminal_value: float
    terminal_grad: float
    total: float
    y0: float = Field(default=float("nan"), description="Mean network value at t = 0")

    CSV_COLUMNS: ClassVar[Tuple[str, ...]] = ("step", "lr", "pathwise", "terminal_value", "terminal_grad", "total", "y0")

    def csv_row(self) -> list:
        return [getattr(self, column) for column in self.CSV_COLUMNS]
