"""
Finite-difference oracle for reverse-mode gradients.
"""

from typing import Callable, Union

import numpy as np

from src.autodiff import ops
from src.autodiff.grad import grad_wrt_leaves
from src.autodiff.tape import AdTape, AdValue
from src.common.errors import NumericAbort

EPSILON = 1e-12

ScalarFunction = Callable[[AdValue], Union[AdValue, float]]


def _evaluate(f: ScalarFunction, point: np.ndarray) -> float:
    result = f(ops.constant(point))
    value = float(result.data) if isinstance(result, AdValue) else float(result)
    if not np.isfinite(value):
        raise NumericAbort("non-finite function value in finite-difference check",
                           quantity="f")
    return value


def reverse_mode_gradient(f: ScalarFunction, point: np.ndarray) -> np.ndarray:
    tape = AdTape()
    leaf = tape.leaf(point)
    result = f(leaf)
    if not isinstance(result, AdValue):
        return np.zeros_like(np.asarray(point, dtype=np.float64))
    return grad_wrt_leaves(result, [leaf])[0]


def central_difference_gradient(f: ScalarFunction, point: np.ndarray, h: float) -> np.ndarray:
    point = np.asarray(point, dtype=np.float64)
    grad = np.zeros_like(point)
    for index in np.ndindex(point.shape):
        forward = point.copy()
        backward = point.copy()
        forward[index] += h
        backward[index] -= h
        grad[index] = (_evaluate(f, forward) - _evaluate(f, backward)) / (2.0 * h)
    return grad


def finite_diff_check(f: ScalarFunction, point, h: float = 1e-5) -> float:
    """
    Max over coordinates of |ad - fd| / (|ad| + |fd| + 1e-12).

    f must be written with AdValue operations so it can run on a tape leaf
    and on constants.
    """
    if h <= 0:
        raise ValueError(f"step must be positive, got {h}")
    point = np.asarray(point, dtype=np.float64)
    _evaluate(f, point)

    ad = reverse_mode_gradient(f, point)
    fd = central_difference_gradient(f, point, h)
    deviation = np.abs(ad - fd) / (np.abs(ad) + np.abs(fd) + EPSILON)
    return float(np.max(deviation)) if deviation.size else 0.0
