"""
Primitive operations and their backward rules.

Every rule is expressed with primitives from this module so that gradients
recorded with create_graph=True stay differentiable.
"""

from typing import Optional, Sequence, Tuple

import numpy as np

from src.autodiff.tape import AdTape, AdValue
from src.common.errors import AutodiffError


# ==================== PLUMBING ====================

def constant(data) -> AdValue:
    """Wrap data as a constant (no provenance)."""
    return AdValue(data)


def lift(x, shape: Optional[Tuple[int, ...]] = None) -> AdValue:
    """Coerce AdValue / ndarray / Python scalar to an AdValue."""
    if isinstance(x, AdValue):
        return x
    if np.isscalar(x) and shape is not None:
        return AdValue(np.full(shape, float(x)))
    return AdValue(x)


def _common_tape(inputs: Sequence[AdValue]) -> Optional[AdTape]:
    tape = None
    for value in inputs:
        if value.is_constant:
            continue
        if tape is None:
            tape = value.tape
        elif value.tape is not tape:
            raise AutodiffError("operands are recorded on different tapes")
    return tape


def _emit(op: str, inputs: Tuple[AdValue, ...], data, vjp) -> AdValue:
    tape = _common_tape(inputs)
    if tape is None or not tape.recording:
        return AdValue(data)
    return tape.record(op, inputs, data, vjp)


def _require_same_shape(op: str, a: AdValue, b: AdValue) -> None:
    if a.shape != b.shape:
        raise AutodiffError(f"{op}: shape mismatch {a.shape} vs {b.shape}")


def _require_ndim(op: str, a: AdValue, ndim: int) -> None:
    if a.ndim != ndim:
        raise AutodiffError(f"{op}: expected rank {ndim}, got shape {a.shape}")


# ==================== ELEMENTWISE ====================

def add(a: AdValue, b: AdValue) -> AdValue:
    _require_same_shape("add", a, b)
    return _emit("add", (a, b), a.data + b.data, lambda g, out: (g, g))


def sub(a: AdValue, b: AdValue) -> AdValue:
    _require_same_shape("sub", a, b)
    return _emit("sub", (a, b), a.data - b.data, lambda g, out: (g, neg(g)))


def neg(a: AdValue) -> AdValue:
    return _emit("neg", (a,), -a.data, lambda g, out: (neg(g),))


def mul(a: AdValue, b: AdValue) -> AdValue:
    _require_same_shape("mul", a, b)
    return _emit("mul", (a, b), a.data * b.data, lambda g, out: (mul(g, b), mul(g, a)))


def scale(a: AdValue, c: float) -> AdValue:
    c = float(c)
    return _emit("scale", (a,), a.data * c, lambda g, out: (scale(g, c),))


def square(a: AdValue) -> AdValue:
    return _emit("square", (a,), a.data * a.data, lambda g, out: (scale(mul(g, a), 2.0),))


def sin(a: AdValue) -> AdValue:
    return _emit("sin", (a,), np.sin(a.data), lambda g, out: (mul(g, cos(a)),))


def cos(a: AdValue) -> AdValue:
    return _emit("cos", (a,), np.cos(a.data), lambda g, out: (neg(mul(g, sin(a))),))


def exp(a: AdValue) -> AdValue:
    return _emit("exp", (a,), np.exp(a.data), lambda g, out: (mul(g, out),))


def tanh(a: AdValue) -> AdValue:
    def vjp(g, out):
        return (sub(g, mul(g, square(out))),)
    return _emit("tanh", (a,), np.tanh(a.data), vjp)


def identity(a: AdValue) -> AdValue:
    return _emit("identity", (a,), a.data, lambda g, out: (g,))


# ==================== LINEAR ALGEBRA ====================

def matmul(a: AdValue, b: AdValue) -> AdValue:
    """Batched matvec: (m, k) @ (k, n)."""
    _require_ndim("matmul", a, 2)
    _require_ndim("matmul", b, 2)
    if a.shape[1] != b.shape[0]:
        raise AutodiffError(f"matmul: shape mismatch {a.shape} @ {b.shape}")

    def vjp(g, out):
        return (matmul(g, transpose(b)), matmul(transpose(a), g))

    return _emit("matmul", (a, b), a.data @ b.data, vjp)


def transpose(a: AdValue) -> AdValue:
    _require_ndim("transpose", a, 2)
    return _emit("transpose", (a,), a.data.T.copy(), lambda g, out: (transpose(g),))


def add_bias(a: AdValue, b: AdValue) -> AdValue:
    """Add a row vector (n,) to every row of an (m, n) matrix."""
    _require_ndim("add_bias", a, 2)
    _require_ndim("add_bias", b, 1)
    if a.shape[1] != b.shape[0]:
        raise AutodiffError(f"add_bias: shape mismatch {a.shape} + {b.shape}")
    return _emit("add_bias", (a, b), a.data + b.data, lambda g, out: (g, sum_rows(g)))


# ==================== REDUCTIONS / BROADCASTS ====================

def total_sum(a: AdValue) -> AdValue:
    shape = a.shape
    return _emit("sum", (a,), np.sum(a.data), lambda g, out: (fill(g, shape),))


def fill(a: AdValue, shape: Tuple[int, ...]) -> AdValue:
    """Broadcast a scalar to a full tensor."""
    if a.ndim != 0:
        raise AutodiffError(f"fill: expected a scalar, got shape {a.shape}")
    shape = tuple(shape)
    return _emit("fill", (a,), np.full(shape, float(a.data)), lambda g, out: (total_sum(g),))


def sum_rows(a: AdValue) -> AdValue:
    """(m, n) -> (n,) summing over rows."""
    _require_ndim("sum_rows", a, 2)
    m = a.shape[0]
    return _emit("sum_rows", (a,), a.data.sum(axis=0), lambda g, out: (broadcast_rows(g, m),))


def broadcast_rows(a: AdValue, m: int) -> AdValue:
    """(n,) -> (m, n) repeating the row."""
    _require_ndim("broadcast_rows", a, 1)
    data = np.broadcast_to(a.data, (m, a.shape[0])).copy()
    return _emit("broadcast_rows", (a,), data, lambda g, out: (sum_rows(g),))


def row_sum(a: AdValue) -> AdValue:
    """(m, n) -> (m,) summing each row."""
    _require_ndim("row_sum", a, 2)
    n = a.shape[1]
    return _emit("row_sum", (a,), a.data.sum(axis=1), lambda g, out: (broadcast_cols(g, n),))


def broadcast_cols(a: AdValue, n: int) -> AdValue:
    """(m,) -> (m, n) repeating each entry along its row."""
    _require_ndim("broadcast_cols", a, 1)
    data = np.repeat(a.data[:, None], n, axis=1)
    return _emit("broadcast_cols", (a,), data, lambda g, out: (row_sum(g),))


# ==================== STRUCTURE ====================

def take_cols(a: AdValue, start: int, stop: int) -> AdValue:
    _require_ndim("take_cols", a, 2)
    n = a.shape[1]
    if not 0 <= start < stop <= n:
        raise AutodiffError(f"take_cols: invalid range [{start}, {stop}) for {n} columns")
    data = a.data[:, start:stop].copy()
    return _emit("take_cols", (a,), data, lambda g, out: (pad_cols(g, start, n),))


def pad_cols(a: AdValue, start: int, n: int) -> AdValue:
    _require_ndim("pad_cols", a, 2)
    k = a.shape[1]
    data = np.zeros((a.shape[0], n))
    data[:, start:start + k] = a.data
    return _emit("pad_cols", (a,), data, lambda g, out: (take_cols(g, start, start + k),))


def take_rows(a: AdValue, start: int, stop: int) -> AdValue:
    if a.ndim not in (1, 2):
        raise AutodiffError(f"take_rows: expected rank 1 or 2, got shape {a.shape}")
    m = a.shape[0]
    if not 0 <= start < stop <= m:
        raise AutodiffError(f"take_rows: invalid range [{start}, {stop}) for {m} rows")
    data = a.data[start:stop].copy()
    return _emit("take_rows", (a,), data, lambda g, out: (pad_rows(g, start, m),))


def pad_rows(a: AdValue, start: int, m: int) -> AdValue:
    k = a.shape[0]
    data = np.zeros((m,) + a.shape[1:])
    data[start:start + k] = a.data
    return _emit("pad_rows", (a,), data, lambda g, out: (take_rows(g, start, start + k),))


def concat_cols(a: AdValue, b: AdValue) -> AdValue:
    _require_ndim("concat_cols", a, 2)
    _require_ndim("concat_cols", b, 2)
    if a.shape[0] != b.shape[0]:
        raise AutodiffError(f"concat_cols: row mismatch {a.shape} | {b.shape}")
    p, q = a.shape[1], b.shape[1]
    data = np.concatenate([a.data, b.data], axis=1)
    return _emit(
        "concat_cols", (a, b), data,
        lambda g, out: (take_cols(g, 0, p), take_cols(g, p, p + q)),
    )


def reshape(a: AdValue, shape: Tuple[int, ...]) -> AdValue:
    original = a.shape
    data = a.data.reshape(shape).copy()
    return _emit("reshape", (a,), data, lambda g, out: (reshape(g, original),))


# ==================== COMPOSITES ====================

def mean(a: AdValue) -> AdValue:
    return scale(total_sum(a), 1.0 / a.data.size)


def row_dot(a: AdValue, b: AdValue) -> AdValue:
    """Per-row inner product of two (m, n) matrices."""
    return row_sum(mul(a, b))


def mul_rows(a: AdValue, s: AdValue) -> AdValue:
    """Scale row i of an (m, n) matrix by s[i]."""
    return mul(a, broadcast_cols(s, a.shape[1]))
