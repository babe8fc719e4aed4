"""
Configuration management for tracesig.
Reads the keystore location, parameter overrides and a default seed from a
json, yaml or toml file.
"""

import json
import logging
import os
from typing import Any, Dict, Optional

import toml
import yaml

from ..errors import ParameterError
from ..utils.file_utils import find_first_existing_file

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATHS = [
    "~/.tracesig/config.json",
    "~/.config/tracesig/config.json",
    "./tracesig.json",
]

DEFAULT_KEYSTORE = "~/.tracesig"

PARAM_KEYS = {
    "lambda_desk": int,
    "group_size": int,
    "n": int,
    "kappa": int,
    "p": int,
    "B_lwe": int,
    "sigma_lwe": float,
}


class TraceSigConfig:
    """Manages the tracesig configuration document."""

    def __init__(self, config_path: Optional[str] = None):
        """
        Initialize the configuration manager.

        Args:
            config_path: Path to the config file. If None, TRACESIG_CONFIG and then
                DEFAULT_CONFIG_PATHS are searched.
        """
        self.config_path = self._find_config_file(config_path)
        self.config = self._load_config()

    def _find_config_file(self, config_path: Optional[str] = None) -> str:
        """
        Find the configuration file.

        Returns:
            Path to the config file; the first default location if none exists yet.
        """
        config_path = config_path or os.environ.get("TRACESIG_CONFIG")
        if config_path:
            return os.path.expanduser(config_path)

        return find_first_existing_file(DEFAULT_CONFIG_PATHS, os.path.expanduser(DEFAULT_CONFIG_PATHS[0]))

    def _load_config(self) -> Dict[str, Any]:
        """
        Load the configuration file; a missing file is an empty configuration.

        Raises:
            ParameterError: If the file exists but does not parse to a mapping.
        """
        if not os.path.exists(self.config_path):
            return {}
        try:
            with open(self.config_path, "r") as f:
                if self.config_path.endswith((".yaml", ".yml")):
                    data = yaml.safe_load(f)
                elif self.config_path.endswith(".toml"):
                    data = toml.load(f)
                else:
                    data = json.load(f)
        except (json.JSONDecodeError, yaml.YAMLError, toml.TomlDecodeError) as e:
            raise ParameterError(f"cannot parse config {self.config_path}: {e}") from e
        if data is None:
            return {}
        if not isinstance(data, dict):
            raise ParameterError(f"config {self.config_path} is not a mapping")
        return data

    def save_config(self) -> None:
        """Save the current configuration in the format its extension names."""
        parent = os.path.dirname(self.config_path)
        if parent:
            os.makedirs(parent, exist_ok=True)
        with open(self.config_path, "w") as f:
            if self.config_path.endswith((".yaml", ".yml")):
                yaml.safe_dump(self.config, f)
            elif self.config_path.endswith(".toml"):
                toml.dump(self.config, f)
            else:
                json.dump(self.config, f, indent=2)

    def keystore_path(self, override: Optional[str] = None) -> str:
        """Explicit path, then TRACESIG_KEYSTORE, then the config, then ~/.tracesig."""
        path = override or os.environ.get("TRACESIG_KEYSTORE") or self.config.get("keystore") or DEFAULT_KEYSTORE
        return os.path.expanduser(path)

    def seed(self, override: Optional[int] = None) -> Optional[int]:
        if override is not None:
            return override
        value = self.config.get("seed")
        return None if value is None else int(value)

    def param_overrides(self) -> Dict[str, Any]:
        """
        Parameter overrides with their types checked.

        Raises:
            ParameterError: On an unknown key or a value of the wrong type.
        """
        overrides = self.config.get("params") or {}
        result = {}
        for key, value in overrides.items():
            if key not in PARAM_KEYS:
                raise ParameterError(f"unknown parameter override {key!r}")
            try:
                result[key] = PARAM_KEYS[key](value)
            except (TypeError, ValueError) as e:
                raise ParameterError(f"parameter {key}={value!r}: {e}") from e
        return result

    def set_param(self, key: str, value: Any) -> None:
        if key not in PARAM_KEYS:
            raise ParameterError(f"unknown parameter override {key!r}")
        self.config.setdefault("params", {})[key] = PARAM_KEYS[key](value)
        self.save_config()

    def merge_config(self, new_config: Dict[str, Any]) -> None:
        """
        Merge a new configuration with the existing one.

        Args:
            new_config: New configuration to merge; params are merged key by key.
        """
        for key, value in new_config.items():
            if key == "params":
                self.config.setdefault("params", {}).update(value or {})
            else:
                self.config[key] = value
        self.save_config()
