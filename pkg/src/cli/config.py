"""
Run Configuration

A run is described by one flat YAML mapping (``key: value`` per line).
Preset names select the problem, network, schedule and scheme; the
remaining keys override preset defaults. Unknown keys are rejected.
"""

from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from src.adapters.network_adapter import DeepBsdeAdapter, NetworkSolutionAdapter, TrainableAdapter
from src.common.artifacts import content_hash
from src.common.errors import CheckpointError, ConfigError
from src.common.settings import get_settings
from src.networks.config import DeepBsdeConfig, MlpConfig, MscaleConfig
from src.networks.params import init_params
from src.problems.definition import ProblemDefinition
from src.registry.preset_metadata import PresetKind
from src.registry.preset_registry import load_builtin_presets
from src.schemes.config import LossNormalization, Scheme3Diffusion, SchemeConfig, SchemeName
from src.training.schedule import TrainSchedule


class RunConfig(BaseModel):
    """Every knob of one experiment, validated before any compute."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    # problem
    problem: str = Field(default="bsb", description="Problem preset: bsb | bsb-osc")
    dim: int = Field(default=10, ge=1, description="Spatial dimension d")
    horizon: Optional[float] = Field(default=None, gt=0.0, description="Terminal time T")
    rate: Optional[float] = Field(default=None, description="Interest rate r")
    volatility: Optional[float] = Field(default=None, description="Diffusion scale sigma")
    alpha: Optional[float] = Field(default=None, description="Oscillation amplitude (bsb-osc)")
    beta: Optional[float] = Field(default=None, description="Oscillation offset (bsb-osc)")
    gamma: Optional[float] = Field(default=None, description="Oscillation frequency (bsb-osc)")

    # network
    network: str = Field(default="desk-fc", description="Network preset")
    mscale_network: str = Field(default="desk-ms4", description="Multiscale preset for comparisons")
    hidden_layers: Optional[int] = Field(default=None, ge=1)
    hidden_width: Optional[int] = Field(default=None, ge=1)
    mscale_hidden_width: Optional[int] = Field(default=None, ge=1, description="Sub-network width of mscale_network")
    match_tolerance: Optional[float] = Field(
        default=0.05, ge=0.0,
        description="Largest relative parameter-count gap in comparisons (null: record only)"
    )
    activation: Optional[str] = Field(default=None, description="sine | tanh")

    # scheme
    scheme: SchemeName = Field(default=SchemeName.S2)
    n_steps: int = Field(default=48, ge=1, description="Training time steps N")
    n_list: List[int] = Field(default_factory=lambda: [12, 48], description="N values for convergence studies")
    extrapolate: bool = Field(default=True, description="Require 4x ratios and emit extrapolated errors")
    batch: int = Field(default=100, ge=1, description="Paths per step M")
    beta1: float = Field(default=0.02, ge=0.0)
    beta2: float = Field(default=0.02, ge=0.0)
    loss_normalization: LossNormalization = Field(default=LossNormalization.AVERAGED)
    scheme3_diffusion: Scheme3Diffusion = Field(default=Scheme3Diffusion.AS_PRINTED)

    # training
    schedule: str = Field(default="desk-bsb", description="Schedule preset")
    initial_lr: Optional[float] = Field(default=None, gt=0.0)
    steps_per_stage: Optional[int] = Field(default=None, ge=1)
    n_stages: Optional[int] = Field(default=None, ge=1)
    seed: int = Field(default=0, ge=0)
    log_every: int = Field(default=100, ge=1)
    checkpoint_every: int = Field(default=0, ge=0)
    workers: int = Field(default_factory=lambda: get_settings().workers, ge=1,
                         description="Threads drawing increments (does not change results)")

    # evaluation
    verify_paths: int = Field(default=1000, ge=1)
    verify_steps: int = Field(default=1000, ge=1)
    sample_paths: int = Field(default=8, ge=1)
    field_t_max: float = Field(default=0.1, gt=0.0)

    output_dir: Optional[str] = Field(default=None, description="Run directory")

    @field_validator("network", "mscale_network", "schedule")
    @classmethod
    def _canonical_preset(cls, value: str) -> str:
        return load_builtin_presets().resolve(value)

    @field_validator("n_list")
    @classmethod
    def _positive_steps(cls, value: List[int]) -> List[int]:
        if not value or any(n < 1 for n in value):
            raise ValueError("n_list must hold positive integers")
        return value

    # ==================== PROVENANCE ====================

    @property
    def config_hash(self) -> str:
        return content_hash(self.model_dump(mode="json", exclude={"output_dir", "workers"}))

    def provenance(self) -> Dict[str, Any]:
        return {"config_hash": self.config_hash, "seed": self.seed}

    # ==================== BUILDERS ====================

    def build_problem(self) -> ProblemDefinition:
        overrides = {"d": self.dim, "T": self.horizon, "r": self.rate, "sigma": self.volatility}
        if self.problem == "bsb-osc":
            overrides.update(alpha=self.alpha, beta=self.beta, gamma=self.gamma)
        elif any(v is not None for v in (self.alpha, self.beta, self.gamma)):
            raise ConfigError("alpha, beta and gamma only apply to bsb-osc", field="problem")
        return _build(self.problem, PresetKind.PROBLEM, overrides)

    def build_network_config(self, preset: Optional[str] = None) -> Union[MlpConfig, MscaleConfig]:
        preset = load_builtin_presets().resolve(preset or self.network)
        width = self.hidden_width
        if preset == self.mscale_network and self.mscale_hidden_width is not None:
            width = self.mscale_hidden_width
        overrides = {"d": self.dim, "hidden_layers": self.hidden_layers,
                     "hidden_width": width, "activation": self.activation}
        return _build(preset, PresetKind.NETWORK, overrides)

    def build_scheme(self, n_steps: Optional[int] = None, noise_steps: Optional[int] = None) -> SchemeConfig:
        overrides = {
            "n_steps": n_steps or self.n_steps,
            "batch": self.batch,
            "beta1": self.beta1,
            "beta2": self.beta2,
            "loss_normalization": self.loss_normalization.value,
            "scheme3_diffusion": self.scheme3_diffusion.value,
        }
        scheme = _build(self.scheme.value, PresetKind.SCHEME, overrides)
        updates = {"problem": self.problem}
        if noise_steps is not None:
            updates["noise_steps"] = noise_steps
        try:
            return SchemeConfig(**{**scheme.model_dump(), **updates})
        except ValidationError as exc:
            raise ConfigError(_first_error(exc), field="scheme") from exc

    def build_schedule(self) -> TrainSchedule:
        overrides = {"initial_lr": self.initial_lr, "steps_per_stage": self.steps_per_stage,
                     "n_stages": self.n_stages}
        return _build(self.schedule, PresetKind.SCHEDULE, overrides)

    def build_adapter(self, n_steps: Optional[int] = None, network: Optional[str] = None) -> TrainableAdapter:
        """Freshly initialized trainable adapter for the configured scheme."""
        net = self.build_network_config(network)
        if self.scheme == SchemeName.DEEP_BSDE:
            if not isinstance(net, MlpConfig):
                raise ConfigError("the Deep BSDE model needs a plain network preset", field="network")
            config = DeepBsdeConfig(dim=self.dim, n_steps=n_steps or self.n_steps,
                                    hidden_layers=net.hidden_layers, hidden_width=net.hidden_width,
                                    activation=net.activation)
            return DeepBsdeAdapter(init_params(config, self.seed))
        return NetworkSolutionAdapter(init_params(net, self.seed))

    def run_dir(self, default_root: str) -> Path:
        if self.output_dir:
            return Path(self.output_dir)
        return Path(default_root) / f"{self.scheme.value}-{self.config_hash[:12]}"


def _build(preset_id: str, kind: PresetKind, overrides: Dict[str, Any]) -> Any:
    registry = load_builtin_presets()
    allowed = registry.get_preset(preset_id, kind)["metadata"].defaults
    given = {k: v for k, v in overrides.items() if v is not None and k in allowed}
    try:
        return registry.build(preset_id, kind, **given)
    except ConfigError:
        raise
    except ValidationError as exc:
        raise ConfigError(_first_error(exc), field=kind.value) from exc
    except ValueError as exc:
        raise ConfigError(str(exc), field=kind.value) from exc


def _first_error(exc: ValidationError) -> str:
    error = exc.errors()[0]
    location = ".".join(str(part) for part in error.get("loc", ()))
    return f"{location}: {error.get('msg')}" if location else str(error.get("msg"))


# ==================== LOADING ====================

def parse_overrides(pairs: Sequence[str]) -> Dict[str, Any]:
    """'key=value' strings; values parsed as YAML scalars."""
    overrides = {}
    for pair in pairs:
        key, sep, raw = pair.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"override '{pair}' is not key=value", field="--set")
        overrides[key.strip()] = yaml.safe_load(raw) if raw.strip() else None
    return overrides


def load_run_config(path: Optional[Union[str, Path]] = None,
                    overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """
    Read a flat YAML run config, apply overrides, validate.

    Raises:
        ConfigError: Nested values, unknown keys or invalid values
        CheckpointError: Unreadable file
    """
    raw: Dict[str, Any] = {}
    if path is not None:
        try:
            raw = yaml.safe_load(Path(path).read_text()) or {}
        except OSError as exc:
            raise CheckpointError(f"cannot read config {path}: {exc}") from exc
        except yaml.YAMLError as exc:
            raise ConfigError(f"{path} is not valid YAML: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError(f"{path} must hold a key: value mapping")

    merged = {**raw, **(overrides or {})}
    for key, value in merged.items():
        if isinstance(value, dict) or (isinstance(value, list) and any(isinstance(v, (dict, list)) for v in value)):
            raise ConfigError("nested values are not allowed", field=key)

    unknown = sorted(set(merged) - set(RunConfig.model_fields))
    if unknown:
        raise ConfigError(f"unknown key(s) {unknown}", field=unknown[0])
    try:
        return RunConfig(**merged)
    except ValidationError as exc:
        raise ConfigError(_first_error(exc)) from exc
