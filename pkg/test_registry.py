"""Test the preset registry."""

import pytest

from src.common.errors import ConfigError
from src.networks import MlpConfig, MscaleConfig
from src.problems import ProblemDefinition
from src.registry import (
    PresetKind,
    PresetMetadata,
    PresetRegistry,
    get_registry,
    load_builtin_presets,
    register_preset,
)
from src.schemes import SchemeConfig, SchemeName
from src.training import TrainSchedule


def _metadata(preset_id, kind=PresetKind.SCHEDULE, **kwargs):
    return PresetMetadata(
        preset_id=preset_id,
        name=preset_id.title(),
        description=f"Test preset {preset_id}",
        kind=kind,
        **kwargs
    )


def test_basic_registration():
    """Register and build a preset on a private registry."""
    registry = PresetRegistry()
    registry.register_preset(_metadata("double", defaults={"x": 1}), lambda x: 2 * x)

    assert registry.build("double") == 2
    assert registry.build("double", x=5) == 10
    assert registry.get_metadata("double").kind == PresetKind.SCHEDULE
    print("✅ Basic registration works!")


def test_duplicate_and_unknown():
    registry = PresetRegistry()
    registry.register_preset(_metadata("once"), lambda: 1)
    with pytest.raises(ConfigError):
        registry.register_preset(_metadata("once"), lambda: 2)
    with pytest.raises(ConfigError):
        registry.build("never")
    with pytest.raises(ConfigError):
        registry.build("once", PresetKind.NETWORK)
    print("✅ Duplicate and unknown presets are rejected!")


def test_override_keys_are_checked():
    """Only keys declared in defaults may be overridden."""
    registry = PresetRegistry()
    registry.register_preset(_metadata("add", defaults={"a": 1, "b": 2}), lambda a, b: a + b)
    assert registry.build("add", b=10) == 11
    with pytest.raises(ConfigError) as info:
        registry.build("add", c=3)
    assert "c" in str(info.value)
    print("✅ Override keys are checked!")


def test_disabled_preset():
    registry = PresetRegistry()
    registry.register_preset(_metadata("off", enabled=False), lambda: 0)
    assert registry.list_presets() == []
    assert len(registry.list_presets(enabled_only=False)) == 1
    with pytest.raises(ConfigError):
        registry.build("off")
    print("✅ Disabled presets are hidden!")


def test_decorator_registration():
    """The decorator registers into the global registry."""

    @register_preset(
        preset_id="test-constant-schedule",
        name="Constant",
        description="One stage at a fixed rate",
        kind=PresetKind.SCHEDULE,
        defaults={"lr": 1e-3, "steps": 4},
        tags=["test"]
    )
    def constant(lr, steps):
        return TrainSchedule(name="constant", stages=[{"learning_rate": lr, "steps": steps}])

    schedule = get_registry().build("test-constant-schedule", PresetKind.SCHEDULE, steps=7)
    assert schedule.total_steps == 7
    print("✅ Decorator registration works!")


def test_builtin_presets():
    """Problems, networks, schedules and schemes are all discoverable."""
    registry = load_builtin_presets()
    ids = {kind: {m.preset_id for m in registry.list_presets(kind)} for kind in PresetKind}
    assert {"bsb", "bsb-osc"} <= ids[PresetKind.PROBLEM]
    assert {"full-fc", "full-ms4", "desk-fc", "desk-ms4"} <= ids[PresetKind.NETWORK]
    assert {"full", "desk-bsb", "smoke"} <= ids[PresetKind.SCHEDULE]
    assert {"deep_bsde", "s1", "s2", "s3"} <= ids[PresetKind.SCHEME]

    assert isinstance(registry.build("bsb", d=3), ProblemDefinition)
    assert isinstance(registry.build("desk-fc", d=3), MlpConfig)
    assert isinstance(registry.build("desk-ms4", d=3), MscaleConfig)
    scheme = registry.build("s3", n_steps=12)
    assert isinstance(scheme, SchemeConfig) and scheme.scheme == SchemeName.S3
    assert scheme.beta1 == 0.02 and scheme.batch == 100
    print("✅ Builtin presets work!")


def test_search_and_statistics():
    registry = load_builtin_presets()
    found = {m.preset_id for m in registry.search_presets("multiscale")}
    assert {"full-ms4", "desk-ms4"} <= found
    stats = registry.get_statistics()
    assert stats["by_kind"]["scheme"] == 4
    assert stats["total_presets"] >= 13
    print("✅ Search and statistics work!")


def test_aliases_resolve_to_their_preset():
    """Published-setting ids are aliases of the full-scale presets."""
    registry = load_builtin_presets()
    assert registry.resolve("paper-fc") == "full-fc"
    assert registry.resolve("paper-ms4") == "full-ms4"
    assert registry.resolve("paper") == "full"
    assert registry.resolve("desk-fc") == "desk-fc"

    assert registry.build("paper-fc", d=3) == registry.build("full-fc", d=3)
    assert registry.build("paper-ms4", d=3) == registry.build("full-ms4", d=3)
    assert registry.build("paper", PresetKind.SCHEDULE).total_steps == 50000
    assert registry.get_metadata("paper-fc").preset_id == "full-fc"
    assert registry.get_statistics()["total_aliases"] >= 3
    print("✅ Preset aliases resolve!")


def test_alias_collisions_are_rejected():
    registry = PresetRegistry()
    registry.register_preset(_metadata("base", aliases=["other"]), lambda: 1)
    assert registry.build("other") == 1
    with pytest.raises(ConfigError):
        registry.register_preset(_metadata("other"), lambda: 2)
    with pytest.raises(ConfigError):
        registry.register_preset(_metadata("fresh", aliases=["base"]), lambda: 3)
    print("✅ Alias collisions are rejected!")


if __name__ == "__main__":
    test_basic_registration()
    test_duplicate_and_unknown()
    test_override_keys_are_checked()
    test_disabled_preset()
    test_decorator_registration()
    test_builtin_presets()
    test_search_and_statistics()
    test_aliases_resolve_to_their_preset()
    test_alias_collisions_are_rejected()

    print("\n" + "=" * 70)
    print("ALL REGISTRY TESTS PASSED! ✅")
    print("=" * 70)
