"""
Sine-activated networks for u(t, x): plain, multiscale and Deep BSDE sub-networks.
"""

from src.networks.config import Activation, MlpConfig, MscaleConfig, DeepBsdeConfig
from src.networks.params import (
    MlpParams,
    MscaleParams,
    DeepBsdeParams,
    NetworkParams,
    INIT_SCHEME,
    init_params,
    bind_params,
    numeric_params,
    parameter_count,
    glorot_bound,
)
from src.networks.forward import (
    network_inputs,
    batch_value,
    value_and_spatial_grad,
    predict,
    predict_with_grad,
    mlp_eval,
    mlp_eval_with_spatial_grad,
    mscale_eval,
)
from src.networks.checkpoint import (
    FORMAT_VERSION,
    architecture_hash,
    save_checkpoint,
    load_checkpoint,
)

__all__ = [
    "Activation",
    "MlpConfig",
    "MscaleConfig",
    "DeepBsdeConfig",
    "MlpParams",
    "MscaleParams",
    "DeepBsdeParams",
    "NetworkParams",
    "INIT_SCHEME",
    "init_params",
    "bind_params",
    "numeric_params",
    "parameter_count",
    "glorot_bound",
    "network_inputs",
    "batch_value",
    "value_and_spatial_grad",
    "predict",
    "predict_with_grad",
    "mlp_eval",
    "mlp_eval_with_spatial_grad",
    "mscale_eval",
    "FORMAT_VERSION",
    "architecture_hash",
    "save_checkpoint",
    "load_checkpoint",
]
