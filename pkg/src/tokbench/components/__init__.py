"""
tokbench Components Package

This package provides automatic plugin discovery and loading for component modules.
Each component (corpus, lattice, subword, vectorize, classify, harness) is a self-contained
plugin with its own configuration and MCP tool handlers.
"""

from pathlib import Path
from typing import List

from tokbench.utils import logger

from .registry import ComponentPlugin, load_plugin_config


def _get_components_dir() -> Path:
    """Get the directory that holds the component packages."""
    return Path(__file__).parent


def discover_component_plugins() -> List[Path]:
    """
    Discover all component plugin directories.

    Scans the components directory for subdirectories containing a config.yaml file.

    Returns:
        List of Path objects representing plugin directories, sorted by name
    """
    components_dir = _get_components_dir()
    plugin_dirs = []

    for item in sorted(components_dir.iterdir()):
        if not item.is_dir():
            continue
        if item.name.startswith("_") or item.name.startswith("."):
            continue

        config_file = item / "config.yaml"
        if config_file.exists():
            plugin_dirs.append(item)
            logger.debug(f"Discovered plugin: {item.name}")

    return plugin_dirs


def load_all_plugins() -> List[ComponentPlugin]:
    """
    Load all enabled component plugins.

    Disabled plugins (enabled: false in config) are skipped.

    Returns:
        List of loaded and enabled ComponentPlugin instances
    """
    plugins = []

    for plugin_dir in discover_component_plugins():
        try:
            config = load_plugin_config(plugin_dir)

            if not config.get("enabled", True):
                logger.info(f"Skipping disabled plugin: {plugin_dir.name}")
                continue

            plugin = ComponentPlugin(plugin_dir, config)
            plugin.load_handlers()

            plugins.append(plugin)
            logger.info(f"Loaded plugin: {plugin.category_name} ({len(plugin.tools)} tools)")

        except Exception as e:
            logger.error(f"Failed to load plugin {plugin_dir.name}: {e}")
            continue

    return plugins


__all__ = ["load_all_plugins", "ComponentPlugin"]
