"""
Staged learning-rate schedules.
"""

from typing import Iterator, List, Tuple

from pydantic import BaseModel, ConfigDict, Field


class Stage(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    learning_rate: float = Field(gt=0.0)
    steps: int = Field(ge=1)


class TrainSchedule(BaseModel):
    """Consecutive (learning_rate, steps) stages."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    name: str = Field(default="custom")
    stages: List[Stage] = Field(default_factory=list)

    @property
    def total_steps(self) -> int:
        return sum(stage.steps for stage in self.stages)

    def lr_at(self, step: int) -> float:
        """Learning rate of global step (0-based)."""
        if step < 0:
            raise ValueError(f"step must be non-negative, got {step}")
        boundary = 0
        for stage in self.stages:
            boundary += stage.steps
            if step < boundary:
                return stage.learning_rate
        raise ValueError(f"step {step} is beyond the schedule ({self.total_steps} steps)")

    def iter_steps(self, start: int = 0) -> Iterator[Tuple[int, float]]:
        """(step, lr) from start to the end of the schedule."""
        boundary = 0
        for stage in self.stages:
            for step in range(max(start, boundary), boundary + stage.steps):
                yield step, stage.learning_rate
            boundary += stage.steps


def geometric_schedule(name: str, initial_lr: float, decay: float, n_stages: int,
                       steps_per_stage: int) -> TrainSchedule:
    """initial_lr, initial_lr * decay, ... each for steps_per_stage steps."""
    return TrainSchedule(
        name=name,
        stages=[
            Stage(learning_rate=initial_lr * decay ** k, steps=steps_per_stage)
            for k in range(n_stages)
        ],
    )
