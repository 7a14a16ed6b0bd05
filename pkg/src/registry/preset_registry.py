"""
Preset Registry

Central catalog where problems, networks, schedules and schemes register
their named presets. Supports discovery by kind or tag and construction with
validated overrides.
"""

from collections import defaultdict
from datetime import datetime
from typing import Any, Callable, Dict, List, Optional

from src.common.errors import ConfigError
from src.common.log import create_logger
from src.registry.preset_metadata import PresetKind, PresetMetadata


class PresetRegistry:
    """
    Central registry for every named preset.

    Features:
    - Register presets by decorator or call
    - Discover presets by kind or tag
    - Build a preset with overrides checked against its declared defaults
    """

    def __init__(self):
        """Initialize empty registry."""
        self._presets: Dict[str, Dict[str, Any]] = {}  # preset_id -> {metadata, factory}
        self._by_kind: Dict[PresetKind, List[str]] = defaultdict(list)
        self._aliases: Dict[str, str] = {}  # alias -> preset_id
        self.logger = create_logger("PresetRegistry")

    def register_preset(self, metadata: PresetMetadata, factory: Callable[..., Any]) -> None:
        """
        Register a preset.

        Args:
            metadata: Preset metadata (kind, defaults, tags)
            factory: Callable building the preset from keyword parameters

        Raises:
            ConfigError: If the preset id or an alias is taken, or factory is not callable
        """
        for name in [metadata.preset_id, *metadata.aliases]:
            if name in self._presets or name in self._aliases:
                raise ConfigError(f"Preset {name} already registered")

        if not callable(factory):
            raise ConfigError("Factory must be callable")

        self._presets[metadata.preset_id] = {
            "metadata": metadata,
            "factory": factory,
            "registered_at": datetime.now().isoformat()
        }
        self._by_kind[metadata.kind].append(metadata.preset_id)
        for alias in metadata.aliases:
            self._aliases[alias] = metadata.preset_id

        self.logger.debug(f"✓ Registered preset: {metadata.preset_id} ({metadata.kind.value})")

    def resolve(self, preset_id: str) -> str:
        """Canonical id for an id or alias; unknown names come back unchanged."""
        return self._aliases.get(preset_id, preset_id)

    def get_preset(self, preset_id: str, kind: Optional[PresetKind] = None) -> Dict[str, Any]:
        """
        Get preset entry by id or alias.

        Raises:
            ConfigError: Unknown id, or id registered under another kind
        """
        entry = self._presets.get(self.resolve(preset_id))
        if entry is None or (kind is not None and entry["metadata"].kind != kind):
            available = sorted(m.preset_id for m in self.list_presets(kind))
            label = kind.value if kind else "preset"
            raise ConfigError(f"unknown {label} '{preset_id}'. Available: {available}")
        return entry

    def get_metadata(self, preset_id: str) -> PresetMetadata:
        return self.get_preset(preset_id)["metadata"]

    def build(self, preset_id: str, kind: Optional[PresetKind] = None, **overrides: Any) -> Any:
        """
        Build a preset, merging overrides into its defaults.

        Raises:
            ConfigError: Unknown preset or override key not declared in defaults
        """
        entry = self.get_preset(preset_id, kind)
        metadata: PresetMetadata = entry["metadata"]

        if not metadata.enabled:
            raise ConfigError(f"Preset {preset_id} is disabled")

        unknown = sorted(set(overrides) - set(metadata.defaults))
        if unknown:
            raise ConfigError(
                f"unknown override(s) {unknown} for preset '{preset_id}'. "
                f"Allowed: {sorted(metadata.defaults)}"
            )

        params = {**metadata.defaults, **overrides}
        return entry["factory"](**params)

    def list_presets(
            self,
            kind: Optional[PresetKind] = None,
            enabled_only: bool = True
    ) -> List[PresetMetadata]:
        """List presets with optional filtering, in registration order."""
        ids = self._by_kind.get(kind, []) if kind else list(self._presets)
        results = []
        for preset_id in ids:
            metadata = self._presets[preset_id]["metadata"]
            if not enabled_only or metadata.enabled:
                results.append(metadata)
        return results

    def search_presets(self, query: str) -> List[PresetMetadata]:
        """Search presets by name, description or tags (case-insensitive)."""
        query_lower = query.lower()
        results = []
        for entry in self._presets.values():
            metadata = entry["metadata"]
            searchable_text = " ".join([
                metadata.name.lower(),
                metadata.description.lower(),
                " ".join(metadata.tags).lower()
            ])
            if query_lower in searchable_text:
                results.append(metadata)
        return results

    def get_statistics(self) -> Dict[str, Any]:
        """Get registry statistics."""
        return {
            "total_presets": len(self._presets),
            "total_aliases": len(self._aliases),
            "by_kind": {
                kind.value: len(ids)
                for kind, ids in self._by_kind.items()
            },
        }


# Global registry instance
_global_registry = None


def get_registry() -> PresetRegistry:
    """Get global preset registry (singleton)."""
    global _global_registry
    if _global_registry is None:
        _global_registry = PresetRegistry()
    return _global_registry


def register_preset(
        preset_id: str,
        name: str,
        description: str,
        kind: PresetKind,
        defaults: Optional[Dict[str, Any]] = None,
        **kwargs
):
    """
    Decorator to register a preset factory.

    Usage:
        @register_preset(
            preset_id="bsb",
            name="Black-Scholes-Barenblatt",
            description="Quadratic terminal data, closed-form solution",
            kind=PresetKind.PROBLEM,
            defaults={"d": 100, "r": 0.05}
        )
        def bsb_preset(d, r):
            ...
    """

    def decorator(func: Callable) -> Callable:
        metadata = PresetMetadata(
            preset_id=preset_id,
            name=name,
            description=description,
            kind=kind,
            defaults=defaults or {},
            **kwargs
        )
        get_registry().register_preset(metadata, func)
        return func

    return decorator


def load_builtin_presets() -> PresetRegistry:
    """Import every module that registers presets and return the registry."""
    import src.problems.presets  # noqa: F401
    import src.networks.presets  # noqa: F401
    import src.training.presets  # noqa: F401
    import src.schemes.presets  # noqa: F401
    return get_registry()
