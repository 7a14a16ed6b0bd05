"""
Runtime Settings

Process-level knobs read from the environment (prefix FBSDE_) or a .env file.
Experiment parameters never live here; they belong to the run config.
"""

from functools import lru_cache

from dotenv import load_dotenv
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class RuntimeSettings(BaseSettings):
    """Settings that affect how a run executes, not what it computes."""

    model_config = SettingsConfigDict(env_prefix="FBSDE_", extra="ignore")

    log_level: str = Field(default="INFO", description="Logging level name")
    output_root: str = Field(default="runs", description="Default parent of run directories")
    workers: int = Field(default=1, ge=1, description="Worker threads drawing Brownian increments")


@lru_cache(maxsize=1)
def get_settings() -> RuntimeSettings:
    """Load settings once per process (singleton)."""
    load_dotenv()
    return RuntimeSettings()
