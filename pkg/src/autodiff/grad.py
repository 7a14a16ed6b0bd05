"""
Reverse sweeps over a tape.

grad_wrt_inputs records the gradient on the tape (second-order contract);
grad_wrt_leaves returns plain arrays for the optimizer.
"""

from contextlib import nullcontext
from typing import Dict, List, Sequence

import numpy as np

from src.autodiff import ops
from src.autodiff.tape import AdValue
from src.common.errors import AutodiffError


def gradients(expr: AdValue, targets: Sequence[AdValue], create_graph: bool = False) -> List[AdValue]:
    """
    Reverse-mode gradients of a scalar expression with respect to roots.

    Args:
        expr: scalar AdValue
        targets: roots (leaves or watched values) of expr's tape
        create_graph: record the sweep so the results are differentiable

    Returns:
        One AdValue per target, zero-filled when the target is unused.
    """
    if not isinstance(expr, AdValue) or expr.ndim != 0:
        shape = expr.shape if isinstance(expr, AdValue) else type(expr).__name__
        raise AutodiffError(f"gradient target must be a scalar AdValue, got {shape}")

    tape = expr.tape
    for target in targets:
        if not isinstance(target, AdValue) or target.is_constant:
            raise AutodiffError("gradient requested with respect to a constant")
        if tape is not None and target.tape is not tape:
            raise AutodiffError("input is not a leaf of the expression's tape")
        if target.index not in target.tape.roots:
            raise AutodiffError(f"node {target.index} is not a leaf / watched root")

    if expr.is_constant:
        return [ops.constant(np.zeros(t.shape)) for t in targets]

    stop = min(t.index for t in targets)
    wanted = {t.index for t in targets}
    cotangents: Dict[int, AdValue] = {expr.index: ops.constant(np.ones(()))}
    found: Dict[int, AdValue] = {}

    context = nullcontext() if create_graph else tape.no_record()
    with context:
        for index in range(expr.index, stop - 1, -1):
            g = cotangents.pop(index, None)
            if g is None:
                continue
            if index in wanted:
                found[index] = g
            node = tape.nodes[index]
            if node.vjp is None or index == stop:
                continue
            for source, contribution in zip(node.inputs, node.vjp(g, node.output)):
                if contribution is None or source.is_constant or source.index < stop:
                    continue
                previous = cotangents.get(source.index)
                cotangents[source.index] = (
                    contribution if previous is None else ops.add(previous, contribution)
                )

    return [found.get(t.index, ops.constant(np.zeros(t.shape))) for t in targets]


def grad_wrt_inputs(expr: AdValue, inputs: AdValue) -> AdValue:
    """
    Gradient of a scalar with respect to a root, recorded on the tape.

    The result can be differentiated again with respect to any other leaf.
    """
    return gradients(expr, [inputs], create_graph=True)[0]


def grad_wrt_leaves(expr: AdValue, leaves: Sequence[AdValue]) -> List[np.ndarray]:
    """Exact reverse-mode gradients as arrays; unused leaves yield zeros."""
    return [g.data.copy() for g in gradients(expr, leaves, create_graph=False)]
