"""
Uniform time partition of [0, T].
"""

import numpy as np
from pydantic import BaseModel, ConfigDict, Field


class TimeGrid(BaseModel):
    """t_0 = 0 < t_1 < ... < t_N = T with constant step T / N."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    n_steps: int = Field(ge=1, description="Number of steps N")
    horizon: float = Field(gt=0.0, description="Terminal time T")

    @property
    def dt(self) -> float:
        return self.horizon / self.n_steps

    @property
    def stations(self) -> np.ndarray:
        return np.linspace(0.0, self.horizon, self.n_steps + 1)

    def time(self, n: int) -> float:
        return float(self.stations[n])

    def refine(self, factor: int) -> "TimeGrid":
        return TimeGrid(n_steps=self.n_steps * factor, horizon=self.horizon)

    def divides(self, other: "TimeGrid") -> bool:
        """True if every station of self is a station of other."""
        return self.horizon == other.horizon and other.n_steps % self.n_steps == 0
