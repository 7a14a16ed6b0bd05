"""
Network presets: the published architectures and their desk-scale variants.

Every factory takes the spatial dimension d so one preset serves any problem.
"""

from src.networks.config import Activation, MlpConfig, MscaleConfig
from src.registry.preset_metadata import PresetKind
from src.registry.preset_registry import register_preset


@register_preset(
    preset_id="full-fc",
    name="Fully connected 5 x 256",
    description="Five sine hidden layers of 256 neurons",
    kind=PresetKind.NETWORK,
    defaults={"d": 100, "hidden_layers": 5, "hidden_width": 256, "activation": "sine"},
    aliases=["paper-fc"],
    tags=["full-scale", "plain"]
)
def full_fc(d: int, hidden_layers: int, hidden_width: int, activation: str) -> MlpConfig:
    return MlpConfig(input_dim=d + 1, hidden_layers=hidden_layers, hidden_width=hidden_width,
                     activation=Activation(activation))


@register_preset(
    preset_id="full-ms4",
    name="Multiscale 4 x (5 x 64)",
    description="Four sine sub-networks, time scaled by 1, 3, 9, 27",
    kind=PresetKind.NETWORK,
    defaults={"d": 100, "n_subnets": 4, "hidden_layers": 5, "hidden_width": 64,
              "scale_base": 3.0, "activation": "sine"},
    aliases=["paper-ms4"],
    tags=["full-scale", "multiscale"]
)
def full_ms4(d: int, n_subnets: int, hidden_layers: int, hidden_width: int,
              scale_base: float, activation: str) -> MscaleConfig:
    return MscaleConfig(input_dim=d + 1, n_subnets=n_subnets, hidden_layers=hidden_layers,
                        hidden_width=hidden_width, scale_base=scale_base,
                        activation=Activation(activation))


@register_preset(
    preset_id="desk-fc",
    name="Fully connected 4 x 64",
    description="Desk-scale plain network",
    kind=PresetKind.NETWORK,
    defaults={"d": 10, "hidden_layers": 4, "hidden_width": 64, "activation": "sine"},
    tags=["desk", "plain"]
)
def desk_fc(d: int, hidden_layers: int, hidden_width: int, activation: str) -> MlpConfig:
    return full_fc(d, hidden_layers, hidden_width, activation)


@register_preset(
    preset_id="desk-ms4",
    name="Multiscale 4 x (4 x 31)",
    description="Desk-scale multiscale network with the same time scales, sized to desk-fc's parameter count",
    kind=PresetKind.NETWORK,
    defaults={"d": 10, "n_subnets": 4, "hidden_layers": 4, "hidden_width": 31,
              "scale_base": 3.0, "activation": "sine"},
    tags=["desk", "multiscale"]
)
def desk_ms4(d: int, n_subnets: int, hidden_layers: int, hidden_width: int,
             scale_base: float, activation: str) -> MscaleConfig:
    return full_ms4(d, n_subnets, hidden_layers, hidden_width, scale_base, activation)
