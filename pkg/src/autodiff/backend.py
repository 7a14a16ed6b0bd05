"""
Array-namespace dispatch.

Coefficient functions and network layers are written once against these
helpers and run on plain numpy arrays outside a tape or on AdValues inside
one.
"""

import numpy as np

from src.autodiff import ops
from src.autodiff.tape import AdValue


def is_traced(*values) -> bool:
    return any(isinstance(v, AdValue) for v in values)


def to_numpy(value) -> np.ndarray:
    return value.data if isinstance(value, AdValue) else np.asarray(value, dtype=np.float64)


def sin(x):
    return ops.sin(x) if is_traced(x) else np.sin(x)


def cos(x):
    return ops.cos(x) if is_traced(x) else np.cos(x)


def exp(x):
    return ops.exp(x) if is_traced(x) else np.exp(x)


def tanh(x):
    return ops.tanh(x) if is_traced(x) else np.tanh(x)


def square(x):
    return ops.square(x) if is_traced(x) else x * x


def row_sum(x):
    """(m, n) -> (m,)"""
    return ops.row_sum(x) if is_traced(x) else np.sum(x, axis=1)


def row_dot(a, b):
    """Per-row inner product of two (m, n) matrices."""
    if is_traced(a, b):
        return ops.row_dot(ops.lift(a), ops.lift(b))
    return np.einsum("ij,ij->i", a, b)


def mul_rows(a, s):
    """Scale row i of an (m, n) matrix by s[i]."""
    if is_traced(a, s):
        return ops.mul_rows(ops.lift(a), ops.lift(s))
    return a * s[:, None]


def linear(h, weight, bias):
    """h @ weight.T + bias for a batch of rows h."""
    if is_traced(h, weight, bias):
        product = ops.matmul(ops.lift(h), ops.transpose(ops.lift(weight)))
        return ops.add_bias(product, ops.lift(bias))
    return h @ weight.T + bias


def scale_cols(h, factors: np.ndarray):
    """Multiply column j of h by the constant factors[j]."""
    if is_traced(h):
        return ops.mul(h, ops.constant(np.broadcast_to(factors, h.shape).copy()))
    return h * factors


def take_col(h, j: int):
    """Column j of an (m, n) matrix as an (m,) vector."""
    if is_traced(h):
        return ops.reshape(ops.take_cols(h, j, j + 1), (h.shape[0],))
    return h[:, j].copy()


def full_like(x, value: float):
    return np.full(to_numpy(x).shape, float(value))


def expand_cols(v, n: int):
    """(m,) -> (m, n) repeating each entry along its row."""
    return ops.broadcast_cols(v, n) if is_traced(v) else np.repeat(v[:, None], n, axis=1)


def concat_cols(a, b):
    if is_traced(a, b):
        return ops.concat_cols(ops.lift(a), ops.lift(b))
    return np.concatenate([a, b], axis=1)
