"""
Network Configurations

Typed architecture descriptions for the plain fully-connected network, the
multiscale ensemble and the Deep BSDE gradient sub-networks.
"""

from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class Activation(str, Enum):
    """Hidden-layer nonlinearity."""
    SINE = "sine"
    TANH = "tanh"


class MlpConfig(BaseModel):
    """
    Fully-connected network u(t, x) with input (t, x_1, ..., x_d).

    hidden_layers hidden layers of hidden_width neurons, then a linear output
    layer of output_dim units.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    input_dim: int = Field(ge=2, description="d + 1 (time prepended to space)")
    hidden_layers: int = Field(ge=1, description="Number of hidden layers")
    hidden_width: int = Field(ge=1, description="Neurons per hidden layer")
    activation: Activation = Field(default=Activation.SINE, description="Hidden activation")
    output_dim: int = Field(default=1, ge=1, description="Output width")

    @property
    def layer_sizes(self) -> List[int]:
        return [self.input_dim] + [self.hidden_width] * self.hidden_layers + [self.output_dim]

    @property
    def parameter_count(self) -> int:
        sizes = self.layer_sizes
        return sum(fan_in * fan_out + fan_out for fan_in, fan_out in zip(sizes[:-1], sizes[1:]))


class MscaleConfig(BaseModel):
    """
    Multiscale ensemble: n_subnets parallel sub-networks, each fed the input
    scaled componentwise by its own vector, combined linearly.

    When `scales` is omitted, sub-network i scales only the time coordinate
    by scale_base**i.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    input_dim: int = Field(ge=2, description="d + 1")
    n_subnets: int = Field(ge=1, description="Number of parallel sub-networks")
    hidden_layers: int = Field(ge=1, description="Hidden layers per sub-network")
    hidden_width: int = Field(ge=1, description="Neurons per hidden layer of each sub-network")
    activation: Activation = Field(default=Activation.SINE)
    scale_base: float = Field(default=3.0, gt=0.0, description="Time scale ratio between sub-networks")
    scales: Optional[List[List[float]]] = Field(
        default=None,
        description="Explicit per-subnetwork scale vectors, each of length input_dim"
    )

    @model_validator(mode="after")
    def _check_scales(self) -> "MscaleConfig":
        if self.scales is None:
            return self
        if len(self.scales) != self.n_subnets:
            raise ValueError(f"{len(self.scales)} scale vectors for {self.n_subnets} sub-networks")
        for i, vector in enumerate(self.scales):
            if len(vector) != self.input_dim:
                raise ValueError(
                    f"scale vector {i} has length {len(vector)}, expected input_dim={self.input_dim}"
                )
        return self

    def scale_vectors(self) -> List[List[float]]:
        if self.scales is not None:
            return [list(v) for v in self.scales]
        return [
            [self.scale_base ** i] + [1.0] * (self.input_dim - 1)
            for i in range(self.n_subnets)
        ]

    def time_scales(self) -> List[float]:
        return [vector[0] for vector in self.scale_vectors()]

    def subnet_config(self) -> MlpConfig:
        return MlpConfig(
            input_dim=self.input_dim,
            hidden_layers=self.hidden_layers,
            hidden_width=self.hidden_width,
            activation=self.activation,
        )

    @property
    def parameter_count(self) -> int:
        # sub-networks, combination weights, output bias
        return self.n_subnets * self.subnet_config().parameter_count + self.n_subnets + 1


class DeepBsdeConfig(BaseModel):
    """Trainable (Y_0, Z_0) plus N - 1 gradient sub-networks X_n -> Z_n."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    dim: int = Field(ge=1, description="Spatial dimension d")
    n_steps: int = Field(ge=1, description="Time steps N")
    hidden_layers: int = Field(ge=1)
    hidden_width: int = Field(ge=1)
    activation: Activation = Field(default=Activation.SINE)
    y0_init: float = Field(default=0.0, description="Initial guess for Y_0")
    z0_range: float = Field(default=0.1, ge=0.0, description="Z_0 initialized uniform on (-z0_range, z0_range)")

    def subnet_config(self) -> MlpConfig:
        # sub-networks see X only; input_dim >= 2 is an MlpConfig invariant for (t, x)
        return MlpConfig.model_construct(
            input_dim=self.dim,
            hidden_layers=self.hidden_layers,
            hidden_width=self.hidden_width,
            activation=self.activation,
            output_dim=self.dim,
        )
