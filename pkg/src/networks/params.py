"""
Network parameter sets and their initialization.

A parameter set is immutable; training produces a new set each step via
with_tensors. Tensors are numpy arrays outside a tape and leaf AdValues once
bound to one, and the same forward code serves both.
"""

from dataclasses import dataclass
from typing import Any, Dict, List, Sequence, Tuple, Union

import numpy as np

from src.autodiff import backend as B
from src.autodiff.tape import AdTape
from src.networks.config import Activation, DeepBsdeConfig, MlpConfig, MscaleConfig
from src.simulate.rng import SeedDomain, stream_for

INIT_SCHEME = "glorot_uniform/zero_bias"


def _activate(activation: Activation, h):
    if activation == Activation.SINE:
        return B.sin(h)
    return B.tanh(h)


@dataclass(frozen=True)
class MlpParams:
    """W^[k] of shape (out, in) and b^[k] of shape (out,) for every layer."""

    config: MlpConfig
    weights: Tuple[Any, ...]
    biases: Tuple[Any, ...]

    def __post_init__(self):
        sizes = self.config.layer_sizes
        if len(self.weights) != len(sizes) - 1 or len(self.biases) != len(sizes) - 1:
            raise ValueError(f"expected {len(sizes) - 1} layers, got {len(self.weights)}")
        for k, (w, b) in enumerate(zip(self.weights, self.biases)):
            expected = (sizes[k + 1], sizes[k])
            if tuple(w.shape) != expected or tuple(b.shape) != (sizes[k + 1],):
                raise ValueError(
                    f"layer {k}: weight {tuple(w.shape)} / bias {tuple(b.shape)} do not chain, "
                    f"expected {expected} / {(sizes[k + 1],)}"
                )

    def tensors(self) -> List[Any]:
        out = []
        for w, b in zip(self.weights, self.biases):
            out.extend([w, b])
        return out

    def with_tensors(self, tensors: Sequence[Any]) -> "MlpParams":
        tensors = list(tensors)
        return MlpParams(self.config, tuple(tensors[0::2]), tuple(tensors[1::2]))

    def forward(self, inputs):
        """(B, input_dim) -> (B, output_dim)."""
        h = inputs
        last = len(self.weights) - 1
        for k, (w, b) in enumerate(zip(self.weights, self.biases)):
            h = B.linear(h, w, b)
            if k < last:
                h = _activate(self.config.activation, h)
        return h

    def architecture(self) -> Dict[str, Any]:
        return {"kind": "mlp", "config": self.config.model_dump(mode="json")}


@dataclass(frozen=True)
class MscaleParams:
    """
    Sub-networks, combination weights W^[L] (1, n_sub), shared bias b^[L] (1,)
    and constant scale vectors (n_sub, input_dim).
    """

    config: MscaleConfig
    subnets: Tuple[MlpParams, ...]
    combination: Any
    output_bias: Any
    scales: np.ndarray

    def __post_init__(self):
        n_sub = self.config.n_subnets
        if len(self.subnets) != n_sub:
            raise ValueError(f"{len(self.subnets)} sub-networks for n_subnets={n_sub}")
        if tuple(self.combination.shape) != (1, n_sub) or tuple(self.output_bias.shape) != (1,):
            raise ValueError("combination must be (1, n_subnets) and output bias (1,)")
        if self.scales.shape != (n_sub, self.config.input_dim):
            raise ValueError(
                f"scales have shape {self.scales.shape}, expected {(n_sub, self.config.input_dim)}"
            )

    def tensors(self) -> List[Any]:
        out = []
        for subnet in self.subnets:
            out.extend(subnet.tensors())
        out.extend([self.combination, self.output_bias])
        return out

    def with_tensors(self, tensors: Sequence[Any]) -> "MscaleParams":
        tensors = list(tensors)
        subnets = []
        offset = 0
        for subnet in self.subnets:
            count = len(subnet.tensors())
            subnets.append(subnet.with_tensors(tensors[offset:offset + count]))
            offset += count
        return MscaleParams(self.config, tuple(subnets), tensors[offset], tensors[offset + 1], self.scales)

    def forward(self, inputs):
        outputs = None
        for subnet, scale in zip(self.subnets, self.scales):
            column = subnet.forward(B.scale_cols(inputs, scale))
            outputs = column if outputs is None else B.concat_cols(outputs, column)
        return B.linear(outputs, self.combination, self.output_bias)

    def architecture(self) -> Dict[str, Any]:
        return {"kind": "mscale", "config": self.config.model_dump(mode="json")}


@dataclass(frozen=True)
class DeepBsdeParams:
    """Y_0 (scalar), Z_0 (d,) and N - 1 sub-networks for Z_1 .. Z_{N-1}."""

    config: DeepBsdeConfig
    y0: Any
    z0: Any
    subnets: Tuple[MlpParams, ...]

    def __post_init__(self):
        if len(self.subnets) != self.config.n_steps - 1:
            raise ValueError(f"{len(self.subnets)} sub-networks for N={self.config.n_steps}")
        if tuple(self.y0.shape) != () or tuple(self.z0.shape) != (self.config.dim,):
            raise ValueError("y0 must be a scalar and z0 a vector of length d")

    def tensors(self) -> List[Any]:
        out = [self.y0, self.z0]
        for subnet in self.subnets:
            out.extend(subnet.tensors())
        return out

    def with_tensors(self, tensors: Sequence[Any]) -> "DeepBsdeParams":
        tensors = list(tensors)
        subnets = []
        offset = 2
        for subnet in self.subnets:
            count = len(subnet.tensors())
            subnets.append(subnet.with_tensors(tensors[offset:offset + count]))
            offset += count
        return DeepBsdeParams(self.config, tensors[0], tensors[1], tuple(subnets))

    def architecture(self) -> Dict[str, Any]:
        return {"kind": "deep_bsde", "config": self.config.model_dump(mode="json")}


NetworkParams = Union[MlpParams, MscaleParams, DeepBsdeParams]


# ==================== INITIALIZATION ====================

def glorot_bound(fan_in: int, fan_out: int) -> float:
    return float(np.sqrt(6.0 / (fan_in + fan_out)))


def _init_mlp(config: MlpConfig, rng: np.random.Generator) -> MlpParams:
    sizes = config.layer_sizes
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = glorot_bound(fan_in, fan_out)
        weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return MlpParams(config, tuple(weights), tuple(biases))


def init_params(config: Union[MlpConfig, MscaleConfig, DeepBsdeConfig], seed: int) -> NetworkParams:
    """
    Glorot-uniform weights and zero biases, deterministic in seed.

    Each sub-network draws from its own INIT substream so adding a
    sub-network leaves the others unchanged.
    """
    stream = stream_for(seed, SeedDomain.INIT)

    if isinstance(config, MlpConfig):
        return _init_mlp(config, stream.generator(0))

    if isinstance(config, MscaleConfig):
        subnet_config = config.subnet_config()
        subnets = tuple(_init_mlp(subnet_config, stream.generator(i)) for i in range(config.n_subnets))
        bound = glorot_bound(config.n_subnets, 1)
        combination = stream.generator(config.n_subnets).uniform(-bound, bound, size=(1, config.n_subnets))
        return MscaleParams(
            config=config,
            subnets=subnets,
            combination=combination,
            output_bias=np.zeros(1),
            scales=np.asarray(config.scale_vectors(), dtype=np.float64),
        )

    if isinstance(config, DeepBsdeConfig):
        subnet_config = config.subnet_config()
        subnets = tuple(_init_mlp(subnet_config, stream.generator(2 + n)) for n in range(config.n_steps - 1))
        z0 = stream.generator(1).uniform(-config.z0_range, config.z0_range, size=config.dim)
        return DeepBsdeParams(config, np.array(config.y0_init, dtype=np.float64), z0, subnets)

    raise TypeError(f"unsupported network config {type(config).__name__}")


# ==================== TAPE BINDING ====================

def bind_params(params: NetworkParams, tape: AdTape) -> Tuple[NetworkParams, List[Any]]:
    """Register every tensor as a leaf; return the bound set and its leaves."""
    leaves = [tape.leaf(B.to_numpy(t)) for t in params.tensors()]
    return params.with_tensors(leaves), leaves


def numeric_params(params: NetworkParams) -> NetworkParams:
    return params.with_tensors([B.to_numpy(t).copy() for t in params.tensors()])


def parameter_count(params: NetworkParams) -> int:
    return int(sum(B.to_numpy(t).size for t in params.tensors()))
