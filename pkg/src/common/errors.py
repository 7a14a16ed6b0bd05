"""
Exception hierarchy shared by every module.

Each class maps to one CLI exit code so a failing run can be classified
without parsing its log.
"""

from typing import Any, Dict, Optional


EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_NUMERIC_ABORT = 3
EXIT_IO_ERROR = 4


class FbsdeError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class ConfigError(FbsdeError, ValueError):
    """Invalid, unknown or inconsistent configuration."""

    exit_code = EXIT_CONFIG_ERROR

    def __init__(self, message: str, field: Optional[str] = None):
        self.field = field
        if field:
            message = f"{field}: {message}"
        super().__init__(message)


class NumericAbort(FbsdeError):
    """
    A non-finite value appeared in a loss or a simulated state.

    Carries structured diagnostics so convergence studies never mask a NaN.
    """

    exit_code = EXIT_NUMERIC_ABORT

    def __init__(
        self,
        message: str,
        step: Optional[int] = None,
        path: Optional[int] = None,
        station: Optional[int] = None,
        quantity: Optional[str] = None,
    ):
        self.step = step
        self.path = path
        self.station = station
        self.quantity = quantity
        super().__init__(f"{message} ({self._describe()})")

    @property
    def diagnostics(self) -> Dict[str, Any]:
        return {
            "step": self.step,
            "path": self.path,
            "station": self.station,
            "quantity": self.quantity,
        }

    def _describe(self) -> str:
        parts = [f"{k}={v}" for k, v in self.diagnostics.items() if v is not None]
        return ", ".join(parts) if parts else "no location"


class SimulationBlowUp(NumericAbort):
    """Euler-Maruyama produced a non-finite state."""


class CheckpointError(FbsdeError):
    """Unreadable, incompatible or missing checkpoint / artifact."""

    exit_code = EXIT_IO_ERROR


class AutodiffError(FbsdeError, ValueError):
    """Misuse of the tape: shape mismatch, foreign tape, non-scalar target."""
