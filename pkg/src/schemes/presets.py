"""
Scheme presets "deep_bsde", "s1", "s2" and "s3" with the published penalties
and batch size.
"""

from src.registry.preset_metadata import PresetKind
from src.registry.preset_registry import register_preset
from src.schemes.config import SchemeConfig, SchemeName

SCHEME_DEFAULTS = {
    "n_steps": 48,
    "batch": 100,
    "beta1": 0.02,
    "beta2": 0.02,
    "loss_normalization": "averaged",
    "scheme3_diffusion": "as_printed",
}

_DESCRIPTIONS = {
    SchemeName.DEEP_BSDE: ("Deep BSDE", "Trainable (Y0, Z0) and per-station gradient networks"),
    SchemeName.S1: ("Scheme 1", "Network rollout against a one-step Euler reference"),
    SchemeName.S2: ("Scheme 2", "Euler-rolled Y against the network value"),
    SchemeName.S3: ("Scheme 3", "Two Euler branches sharing the increments"),
}


def _make_factory(scheme: SchemeName):
    def factory(**params) -> SchemeConfig:
        return SchemeConfig(scheme=scheme, **params)
    factory.__name__ = f"{scheme.value}_preset"
    return factory


for _scheme, (_name, _description) in _DESCRIPTIONS.items():
    register_preset(
        preset_id=_scheme.value,
        name=_name,
        description=_description,
        kind=PresetKind.SCHEME,
        defaults=SCHEME_DEFAULTS,
        tags=["scheme"]
    )(_make_factory(_scheme))
