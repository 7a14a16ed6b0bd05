"""
Training schedule presets.
"""

from src.registry.preset_metadata import PresetKind
from src.registry.preset_registry import register_preset
from src.training.schedule import TrainSchedule, geometric_schedule


@register_preset(
    preset_id="full",
    name="Published schedule",
    description="Adam at 1e-3, 1e-4, 1e-5, 1e-6, 1e-7 for 10000 steps each",
    kind=PresetKind.SCHEDULE,
    defaults={"initial_lr": 1e-3, "decay": 0.1, "n_stages": 5, "steps_per_stage": 10000},
    aliases=["paper"],
    tags=["full-scale"]
)
def full_schedule(initial_lr: float, decay: float, n_stages: int, steps_per_stage: int) -> TrainSchedule:
    return geometric_schedule("full", initial_lr, decay, n_stages, steps_per_stage)


@register_preset(
    preset_id="desk-bsb",
    name="Desk schedule",
    description="Adam at 1e-3 then 1e-4 for 1500 steps each",
    kind=PresetKind.SCHEDULE,
    defaults={"initial_lr": 1e-3, "decay": 0.1, "n_stages": 2, "steps_per_stage": 1500},
    tags=["desk"]
)
def desk_schedule(initial_lr: float, decay: float, n_stages: int, steps_per_stage: int) -> TrainSchedule:
    return geometric_schedule("desk-bsb", initial_lr, decay, n_stages, steps_per_stage)


@register_preset(
    preset_id="smoke",
    name="Smoke schedule",
    description="A handful of steps for wiring checks",
    kind=PresetKind.SCHEDULE,
    defaults={"initial_lr": 1e-3, "decay": 0.1, "n_stages": 2, "steps_per_stage": 3},
    tags=["test"]
)
def smoke_schedule(initial_lr: float, decay: float, n_stages: int, steps_per_stage: int) -> TrainSchedule:
    return geometric_schedule("smoke", initial_lr, decay, n_stages, steps_per_stage)
