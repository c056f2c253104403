"""Loads the run configuration from YAML files.

The main file `main_config.yaml` names the active models; their sections and
the sampler, EM and evaluation settings are merged in from `configs/`.
Command-line `--set key=value` overrides are applied last.
"""

import copy
import logging
import os
from typing import Any, Dict, Iterable, Optional

import yaml

logger = logging.getLogger(__name__)

DEFAULT_MAIN_CONFIG = "main_config.yaml"
DEFAULT_CONFIGS_DIR = "configs"
DEFAULT_MODELS_SUBDIR = "model_configs"
DEFAULT_SAMPLERS_SUBDIR = "sampler_configs"
DEFAULT_EM_CONFIG = "em_config.yaml"
DEFAULT_EVALUATION_CONFIG = "evaluation_config.yaml"
SAMPLER_SECTIONS = ("ess", "hmc")


def _load_single_config(file_path: str) -> Optional[Dict[str, Any]]:
    """Loads one YAML file.

    Returns:
        The parsed dictionary, {} for an empty file, or None if the file is
        missing, unreadable, malformed or not a mapping.
    """
    if not os.path.exists(file_path):
        logger.error(f"Configuration file error: '{file_path}' not found.")
        return None
    try:
        with open(file_path, "r", encoding="utf-8") as f:
            config = yaml.safe_load(f)
    except yaml.YAMLError as e:
        logger.error(f"Configuration file error: Error parsing YAML syntax in '{file_path}'. Details: {e}")
        return None
    except IOError as e:
        logger.error(f"Configuration file error: Could not read file '{file_path}'. Details: {e}")
        return None
    logger.info(f"Configuration section loaded successfully from '{file_path}'")
    if config is None:
        logger.warning(f"Configuration file warning: '{file_path}' is empty or contains only comments/whitespace.")
        return {}
    if not isinstance(config, dict):
        logger.error(
            f"Configuration file error: Content of '{file_path}' is not a valid dictionary. "
            f"Loaded type: {type(config).__name__}"
        )
        return None
    return config


def deep_update(source: Dict, overrides: Dict) -> Dict:
    """Deeply update dictionary source with overrides."""
    for key, value in overrides.items():
        if isinstance(value, dict) and key in source and isinstance(source[key], dict):
            source[key] = deep_update(source[key], value)
        else:
            source[key] = value
    return source


def _merge_section(config: Dict[str, Any], path: str, target: Dict[str, Any], key: str):
    """Merges the `key` entry of the file at `path` into `target[key]`; warns if the file is absent."""
    if not os.path.exists(path):
        logger.warning(f"Configuration file for '{key}' not found at {path}; using built-in defaults")
        return
    loaded = _load_single_config(path)
    if loaded is None:
        logger.warning(f"Ignoring invalid configuration file {path}")
        return
    section = loaded.get(key, loaded)
    if not isinstance(section, dict):
        logger.warning(f"Section '{key}' in {path} is not a mapping; ignored")
        return
    target[key] = deep_update(target.get(key) or {}, section)


def load_config(main_config_path: str = DEFAULT_MAIN_CONFIG) -> Optional[Dict[str, Any]]:
    """Loads the main config and merges the model, sampler, EM and evaluation files.

    Settings written directly in the main file win over the merged files.

    Returns:
        The merged configuration, or None if the main file is missing or invalid.
    """
    if not os.path.exists(main_config_path):
        logger.error(f"Main configuration file not found: {main_config_path}")
        return None
    main = _load_single_config(main_config_path)
    if not main:
        logger.error(f"Main configuration file {main_config_path} is empty or invalid.")
        return None

    base_dir = os.path.join(os.path.dirname(main_config_path) or ".", DEFAULT_CONFIGS_DIR)
    config: Dict[str, Any] = {"models": {}, "sampler": {}}

    active_models = main.get("active_models", [])
    logger.info(f"Identified active models for config loading: {active_models}")
    for name in active_models:
        path = os.path.join(base_dir, DEFAULT_MODELS_SUBDIR, f"{name}_config.yaml")
        _merge_section(config, path, config["models"], name)

    for name in SAMPLER_SECTIONS:
        path = os.path.join(base_dir, DEFAULT_SAMPLERS_SUBDIR, f"{name}_config.yaml")
        _merge_section(config, path, config["sampler"], name)

    _merge_section(config, os.path.join(base_dir, DEFAULT_EM_CONFIG), config, "em")
    _merge_section(config, os.path.join(base_dir, DEFAULT_EVALUATION_CONFIG), config, "evaluation")
    return deep_update(config, main)


def _parse_override(item: str) -> Dict[str, Any]:
    if "=" not in item:
        raise ValueError(f"Override '{item}' is not of the form key=value")
    key, raw = item.split("=", 1)
    key = key.strip()
    if not key or any(not part for part in key.split(".")):
        raise ValueError(f"Override '{item}' has an empty key")
    try:
        value = yaml.safe_load(raw) if raw.strip() else None
    except yaml.YAMLError as e:
        raise ValueError(f"Override '{item}' has an unparsable value: {e}") from e
    nested: Dict[str, Any] = {}
    cursor = nested
    parts = key.split(".")
    for part in parts[:-1]:
        cursor = cursor.setdefault(part, {})
    cursor[parts[-1]] = value
    return nested


def apply_overrides(config: Dict[str, Any], overrides: Iterable[str]) -> Dict[str, Any]:
    """Applies dotted `key=value` overrides; values are parsed as YAML scalars.

    `sampler.hmc.step_size=0.02` sets config['sampler']['hmc']['step_size'] to 0.02.
    The input is not modified.

    Raises:
        ValueError: On an item without '=' or with an empty key.
    """
    merged = copy.deepcopy(config)
    for item in overrides or []:
        deep_update(merged, _parse_override(item))
        logger.info(f"Configuration override applied: {item}")
    return merged
