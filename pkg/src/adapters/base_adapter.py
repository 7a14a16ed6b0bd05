"""
Base Adapter Interface

Defines the contract every approximate solution u(t, x) exposes to schemes,
the trainer and evaluation: a trained network, the closed-form solution or
a scaled copy of either.
"""

from abc import ABC, abstractmethod
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.autodiff import ops
from src.autodiff.tape import AdTape, AdValue
from src.common.errors import AutodiffError, ConfigError
from src.common.log import create_logger


class SolutionAdapter(ABC):
    """Abstract base class for solution adapters."""

    def __init__(self, config: Optional[Dict[str, Any]] = None):
        self.config = config or {}
        self.logger = create_logger(f"Adapter-{self.__class__.__name__}")
        self._tape: Optional[AdTape] = None

    @property
    @abstractmethod
    def dim(self) -> int:
        """Spatial dimension d."""

    @abstractmethod
    def parameters(self) -> List[np.ndarray]:
        """Trainable tensors as arrays (empty when nothing is trainable)."""

    @abstractmethod
    def with_parameters(self, arrays: Sequence[np.ndarray]) -> "SolutionAdapter":
        """A new, unbound adapter carrying the given tensors."""

    @abstractmethod
    def bind(self, tape: AdTape) -> List[AdValue]:
        """Register trainable tensors as leaves of tape and return them."""

    @abstractmethod
    def value_and_grad(self, tape: AdTape, t, x) -> Tuple[AdValue, AdValue]:
        """(u [B], z [B, d]) recorded on tape."""

    @abstractmethod
    def predict(self, t, x: np.ndarray) -> np.ndarray:
        """Numeric u [B], no tape."""

    def predict_with_grad(self, t, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        tape = AdTape()
        u, z = self.value_and_grad(tape, t, np.asarray(x, dtype=np.float64))
        return u.data.copy(), z.data.copy()

    def describe(self) -> Dict[str, Any]:
        return {"adapter": self.__class__.__name__, **self.config}

    def _check_batch(self, x) -> None:
        shape = x.shape if isinstance(x, AdValue) else np.shape(x)
        if len(shape) != 2 or shape[1] != self.dim:
            raise AutodiffError(f"expected a state batch (B, {self.dim}), got {tuple(shape)}")


class ExactSolutionAdapter(SolutionAdapter):
    """
    The closed-form solution of a problem.

    No trainable tensors; used as an evaluation oracle and as the
    exact-solution stub checkpoint.
    """

    def __init__(self, problem, config: Optional[Dict[str, Any]] = None):
        if not problem.has_exact_solution or problem.exact_grad is None:
            raise ConfigError(f"problem {problem.name} has no closed-form solution", field="problem")
        super().__init__({"problem": problem.name, **(config or {})})
        self.problem = problem

    @property
    def dim(self) -> int:
        return self.problem.dim

    def parameters(self) -> List[np.ndarray]:
        return []

    def with_parameters(self, arrays: Sequence[np.ndarray]) -> "ExactSolutionAdapter":
        if len(arrays):
            raise ConfigError("the exact solution has no parameters")
        return ExactSolutionAdapter(self.problem, self.config)

    def bind(self, tape: AdTape) -> List[AdValue]:
        self._tape = tape
        return []

    def value_and_grad(self, tape: AdTape, t, x) -> Tuple[AdValue, AdValue]:
        self._check_batch(x)
        x = x.data if isinstance(x, AdValue) else np.asarray(x, dtype=np.float64)
        u, z = self._evaluate(t, x)
        return ops.constant(u), ops.constant(z)

    def predict(self, t, x: np.ndarray) -> np.ndarray:
        return self._evaluate(t, np.asarray(x, dtype=np.float64))[0]

    def _evaluate(self, t, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        times = np.broadcast_to(np.asarray(t, dtype=np.float64), (x.shape[0],))
        if np.all(times == times[0]):
            return self.problem.exact_u(float(times[0]), x), self.problem.exact_grad(float(times[0]), x)
        # per-row times (stacked stations)
        u = np.empty(x.shape[0])
        z = np.empty_like(x)
        for value in np.unique(times):
            rows = times == value
            u[rows] = self.problem.exact_u(float(value), x[rows])
            z[rows] = self.problem.exact_grad(float(value), x[rows])
        return u, z


class ScaledSolutionAdapter(SolutionAdapter):
    """factor * u for a wrapped adapter (error-report oracle)."""

    def __init__(self, inner: SolutionAdapter, factor: float, config: Optional[Dict[str, Any]] = None):
        super().__init__({"factor": float(factor), **(config or {})})
        self.inner = inner
        self.factor = float(factor)

    @property
    def dim(self) -> int:
        return self.inner.dim

    def parameters(self) -> List[np.ndarray]:
        return self.inner.parameters()

    def with_parameters(self, arrays: Sequence[np.ndarray]) -> "ScaledSolutionAdapter":
        return ScaledSolutionAdapter(self.inner.with_parameters(arrays), self.factor, self.config)

    def bind(self, tape: AdTape) -> List[AdValue]:
        self._tape = tape
        return self.inner.bind(tape)

    def value_and_grad(self, tape: AdTape, t, x) -> Tuple[AdValue, AdValue]:
        u, z = self.inner.value_and_grad(tape, t, x)
        return ops.scale(u, self.factor), ops.scale(z, self.factor)

    def predict(self, t, x: np.ndarray) -> np.ndarray:
        return self.factor * self.inner.predict(t, x)


def create_adapter(kind: str, **kwargs: Any) -> SolutionAdapter:
    """
    Factory function to create the appropriate adapter.

    Kinds: "network" (params=...), "exact" (problem=...),
    "scaled" (inner=..., factor=...), "deep_bsde" (params=...).
    """
    from src.adapters.network_adapter import DeepBsdeAdapter, NetworkSolutionAdapter

    adapters = {
        "network": NetworkSolutionAdapter,
        "exact": ExactSolutionAdapter,
        "scaled": ScaledSolutionAdapter,
        "deep_bsde": DeepBsdeAdapter,
    }

    adapter_class = adapters.get(kind)
    if not adapter_class:
        raise ConfigError(
            f"Unknown adapter type: {kind}. "
            f"Available: {list(adapters.keys())}"
        )

    return adapter_class(**kwargs)
