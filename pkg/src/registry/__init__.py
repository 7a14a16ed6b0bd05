"""
Preset Registry Package
"""

from src.registry.preset_metadata import PresetKind, PresetMetadata
from src.registry.preset_registry import (
    PresetRegistry,
    get_registry,
    register_preset,
    load_builtin_presets,
)

__all__ = [
    "PresetKind",
    "PresetMetadata",
    "PresetRegistry",
    "get_registry",
    "register_preset",
    "load_builtin_presets",
]
