"""
Preset Metadata - Defines preset kinds and the metadata structure.

Problems, network architectures, training schedules and schemes describe
themselves in a standardized way so the CLI can list and build them by name.
"""

from enum import Enum
from typing import Any, Dict, List

from pydantic import BaseModel, ConfigDict, Field


class PresetKind(str, Enum):
    """What a preset builds."""
    PROBLEM = "problem"
    NETWORK = "network"
    SCHEDULE = "schedule"
    SCHEME = "scheme"


class PresetMetadata(BaseModel):
    """
    Metadata describing a preset.

    Filled out by the module that registers the preset.
    """

    model_config = ConfigDict(extra="forbid")

    # Identity
    preset_id: str = Field(description="Unique identifier, used in run configs")
    name: str = Field(description="Human-readable name")
    description: str = Field(description="What this preset builds")
    kind: PresetKind = Field(description="Which factory family it belongs to")

    # Overridable scalar parameters and their defaults
    defaults: Dict[str, Any] = Field(
        default_factory=dict,
        description="Scalar parameters the factory accepts, with default values"
    )

    # Alternative ids accepted by lookups
    aliases: List[str] = Field(default_factory=list, description="Other ids resolving to this preset")

    # Metadata
    tags: List[str] = Field(default_factory=list, description="Search tags")
    enabled: bool = Field(default=True, description="Is preset selectable?")
