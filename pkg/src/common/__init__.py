"""
Common infrastructure: loggers, exception hierarchy, runtime settings.
"""

from src.common.errors import (
    FbsdeError,
    ConfigError,
    NumericAbort,
    SimulationBlowUp,
    CheckpointError,
    AutodiffError,
    EXIT_OK,
    EXIT_CONFIG_ERROR,
    EXIT_NUMERIC_ABORT,
    EXIT_IO_ERROR,
)
from src.common.log import create_logger
from src.common.settings import RuntimeSettings, get_settings

__all__ = [
    "FbsdeError",
    "ConfigError",
    "NumericAbort",
    "SimulationBlowUp",
    "CheckpointError",
    "AutodiffError",
    "EXIT_OK",
    "EXIT_CONFIG_ERROR",
    "EXIT_NUMERIC_ABORT",
    "EXIT_IO_ERROR",
    "create_logger",
    "RuntimeSettings",
    "get_settings",
]
