"""
Loss construction for Deep BSDE and Schemes 1-3.
"""

from src.schemes.config import (
    SchemeName,
    SchemeConfig,
    LossNormalization,
    Scheme3Diffusion,
    LossRecord,
)
from src.schemes.losses import (
    LossBreakdown,
    scheme1_loss,
    scheme2_loss,
    scheme3_loss,
    scheme_loss,
)
from src.schemes.deep_bsde import deep_bsde_loss, deep_bsde_breakdown

__all__ = [
    "SchemeName",
    "SchemeConfig",
    "LossNormalization",
    "Scheme3Diffusion",
    "LossRecord",
    "LossBreakdown",
    "scheme1_loss",
    "scheme2_loss",
    "scheme3_loss",
    "scheme_loss",
    "deep_bsde_loss",
    "deep_bsde_breakdown",
]
