"""
Tape and differentiable values.

An AdTape is an append-only list of primitive operations. Every backward rule
is written with the same primitives, so a backward sweep run while the tape is
recording leaves a differentiable record of the gradient itself (tape of
tape). That is the only second-order mechanism in the package.
"""

from contextlib import contextmanager
from dataclasses import dataclass
from typing import Callable, Iterator, List, Optional, Set, Tuple

import numpy as np

from src.common.errors import AutodiffError


VjpRule = Callable[["AdValue", "AdValue"], Tuple[Optional["AdValue"], ...]]


class AdValue:
    """
    A float64 scalar / vector / matrix with provenance.

    `index` is None for constants, which have zero derivative with respect to
    every leaf.
    """

    __slots__ = ("data", "tape", "index")

    # numpy must hand mixed expressions (ndarray op AdValue) back to us
    __array_ufunc__ = None

    def __init__(self, data, tape: Optional["AdTape"] = None, index: Optional[int] = None):
        self.data = np.asarray(data, dtype=np.float64)
        self.tape = tape
        self.index = index

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def is_constant(self) -> bool:
        return self.index is None

    def item(self) -> float:
        return float(self.data)

    def __repr__(self) -> str:
        origin = "const" if self.is_constant else f"node {self.index}"
        return f"AdValue(shape={self.shape}, {origin})"

    # ==================== OPERATORS ====================

    def __add__(self, other):
        from src.autodiff import ops
        return ops.add(self, ops.lift(other, self.shape))

    def __radd__(self, other):
        from src.autodiff import ops
        return ops.add(ops.lift(other, self.shape), self)

    def __sub__(self, other):
        from src.autodiff import ops
        return ops.sub(self, ops.lift(other, self.shape))

    def __rsub__(self, other):
        from src.autodiff import ops
        return ops.sub(ops.lift(other, self.shape), self)

    def __mul__(self, other):
        from src.autodiff import ops
        if np.isscalar(other):
            return ops.scale(self, float(other))
        return ops.mul(self, ops.lift(other, self.shape))

    def __rmul__(self, other):
        from src.autodiff import ops
        if np.isscalar(other):
            return ops.scale(self, float(other))
        return ops.mul(ops.lift(other, self.shape), self)

    def __truediv__(self, other):
        from src.autodiff import ops
        if not np.isscalar(other):
            raise AutodiffError("division is only supported by a Python scalar")
        return ops.scale(self, 1.0 / float(other))

    def __neg__(self):
        from src.autodiff import ops
        return ops.neg(self)

    def __matmul__(self, other):
        from src.autodiff import ops
        return ops.matmul(self, ops.lift(other))

    def __rmatmul__(self, other):
        from src.autodiff import ops
        return ops.matmul(ops.lift(other), self)


@dataclass
class Node:
    """One primitive application recorded on a tape."""

    op: str
    inputs: Tuple[AdValue, ...]
    output: AdValue
    vjp: Optional[VjpRule]


class AdTape:
    """
    Single-writer record of primitive operations.

    Nodes are appended in evaluation order, so every node's inputs precede it.
    A tape lives for one training step and is then discarded.
    """

    def __init__(self):
        self.nodes: List[Node] = []
        self.roots: Set[int] = set()
        self._recording = True

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def recording(self) -> bool:
        return self._recording

    @contextmanager
    def no_record(self) -> Iterator["AdTape"]:
        """Operations inside the block produce constants."""
        previous = self._recording
        self._recording = False
        try:
            yield self
        finally:
            self._recording = previous

    def leaf(self, data) -> AdValue:
        """Register a new independent variable."""
        value = AdValue(np.array(data, dtype=np.float64, copy=True), self, len(self.nodes))
        self.nodes.append(Node("leaf", (), value, None))
        self.roots.add(value.index)
        return value

    def watch(self, value) -> AdValue:
        """
        Mark a value as a differentiation root.

        Constants become fresh leaves; tape values get an identity node, so
        gradients with respect to the root are available while derivatives
        still flow through to whatever produced it.
        """
        if not isinstance(value, AdValue) or value.is_constant:
            data = value.data if isinstance(value, AdValue) else value
            return self.leaf(data)
        if value.tape is not self:
            raise AutodiffError("cannot watch a value recorded on another tape")
        watched = self.record("identity", (value,), value.data, lambda g, out: (g,))
        self.roots.add(watched.index)
        return watched

    def record(self, op: str, inputs: Tuple[AdValue, ...], data, vjp: VjpRule) -> AdValue:
        value = AdValue(data, self, len(self.nodes))
        self.nodes.append(Node(op, inputs, value, vjp))
        return value
