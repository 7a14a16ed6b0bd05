"""
Adam optimizer, staged schedules and the training loop.
"""

from src.training.adam import AdamState, adam_step, ADAM_BETA1, ADAM_BETA2, ADAM_EPSILON
from src.training.schedule import Stage, TrainSchedule, geometric_schedule
from src.training.trainer import (
    Trainer,
    TrainResult,
    train,
    training_increments,
    checkpoint_name,
    LOSS_LOG,
    FINAL_CHECKPOINT,
)

__all__ = [
    "AdamState",
    "adam_step",
    "ADAM_BETA1",
    "ADAM_BETA2",
    "ADAM_EPSILON",
    "Stage",
    "TrainSchedule",
    "geometric_schedule",
    "Trainer",
    "TrainResult",
    "train",
    "training_increments",
    "checkpoint_name",
    "LOSS_LOG",
    "FINAL_CHECKPOINT",
]
