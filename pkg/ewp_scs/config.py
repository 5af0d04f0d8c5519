# ============================================================================
# EWP-SCS - CONFIGURATION SYSTEM
# ============================================================================
"""
Layered configuration for EWP-SCS.

Supports:
- JSON settings file (~/.ewp_scs/settings.json)
- Project-local settings (.ewp_scs.json)
- Environment variable overrides
- CLI configuration commands (ewp-scs config ...)

Later sources override earlier ones. Settings files are validated against
SETTINGS_SCHEMA; an invalid file is skipped as a whole.
"""

import json
import logging
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional

from jsonschema import ValidationError, validate

from .errors import InputError

logger = logging.getLogger(__name__)

# Settings file locations
USER_CONFIG_DIR = Path.home() / ".ewp_scs"
USER_SETTINGS_FILE = USER_CONFIG_DIR / "settings.json"
LOCAL_SETTINGS_FILE = Path(".ewp_scs.json")


class ConfigError(InputError):
    """Raised on unknown keys or values of the wrong type."""
    pass


SETTINGS_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "properties": {
        "panel": {
            "type": "object",
            "properties": {
                "n_max": {"type": "integer", "minimum": 1, "maximum": 62},
                "delimiter": {"type": "string", "minLength": 1},
                "header": {"type": "boolean"},
                "date_column": {"type": "boolean"},
            },
            "additionalProperties": False,
        },
        "screening": {
            "type": "object",
            "properties": {
                "alpha": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "cov_mode": {"enum": ["iid", "gaussian"]},
                "tau2_floor": {"type": "number", "minimum": 0},
                "delta_floor": {"type": "number", "minimum": 0},
                "block_size": {"type": "integer", "minimum": 1},
                "record_cap": {"type": "integer", "minimum": 1},
            },
            "additionalProperties": False,
        },
        "simulate": {
            "type": "object",
            "properties": {
                "runs": {"type": "integer", "minimum": 2},
                "seed": {"type": "integer", "minimum": 0},
                "noise_is_variance": {"type": "boolean"},
                "fix_graph": {"type": "boolean"},
            },
            "additionalProperties": False,
        },
        "execution": {
            "type": "object",
            "properties": {
                "threads": {"type": "integer", "minimum": 0},
                "out_dir": {"type": "string", "minLength": 1},
            },
            "additionalProperties": False,
        },
        "ui": {
            "type": "object",
            "properties": {
                "verbose": {"type": "boolean"},
                "color_output": {"type": "boolean"},
                "json_output": {"type": "boolean"},
            },
            "additionalProperties": False,
        },
    },
    "additionalProperties": False,
}


@dataclass
class Settings:
    """Complete EWP-SCS settings."""
    # Panel ingestion
    panel: Dict[str, Any] = field(default_factory=lambda: {
        "n_max": 25,
        "delimiter": ",",
        "header": True,
        "date_column": False,
    })

    # Screening defaults
    screening: Dict[str, Any] = field(default_factory=lambda: {
        "alpha": 0.05,
        "cov_mode": "gaussian",
        "tau2_floor": 1e-12,
        "delta_floor": 1e-12,
        "block_size": 4096,
        "record_cap": 1 << 20,
    })

    # Monte Carlo defaults
    simulate: Dict[str, Any] = field(default_factory=lambda: {
        "runs": 300,
        "seed": 42,
        "noise_is_variance": True,
        "fix_graph": False,
    })

    # Execution settings (threads 0 = one per CPU)
    execution: Dict[str, Any] = field(default_factory=lambda: {
        "threads": 0,
        "out_dir": "scs_output",
    })

    # Terminal output
    ui: Dict[str, Any] = field(default_factory=lambda: {
        "verbose": False,
        "color_output": True,
        "json_output": False,
    })


class ConfigManager:
    """
    Resolves EWP-SCS settings, later layers winning:

    defaults, then ~/.ewp_scs/settings.json, then ./.ewp_scs.json, then the
    EWP_SCS_* and NO_COLOR environment variables.
    """

    def __init__(self, user_file: Optional[Path] = None, local_file: Optional[Path] = None):
        self.user_file = Path(user_file) if user_file else USER_SETTINGS_FILE
        self.local_file = Path(local_file) if local_file else LOCAL_SETTINGS_FILE
        self._settings: Optional[Settings] = None
        self._loaded = False

    @property
    def settings(self) -> Settings:
        """Resolved settings; the layers are read on first access."""
        if not self._loaded:
            self.load()
        return self._settings

    def load(self) -> Settings:
        """Re-read every layer from scratch."""
        self._settings = Settings()
        for path in (self.user_file, self.local_file):
            if path.exists():
                self._merge_from_file(path)
        self._apply_env_overrides()
        self._loaded = True
        return self._settings

    def _merge_from_file(self, path: Path) -> None:
        """Merge one settings file; invalid files are skipped whole."""
        try:
            data = json.loads(path.read_text())
            validate(instance=data, schema=SETTINGS_SCHEMA)
        except (json.JSONDecodeError, OSError, ValidationError) as e:
            message = e.message if isinstance(e, ValidationError) else str(e)
            logger.warning(f"Skipping config file {path}: {message}")
            return
        for section, values in data.items():
            getattr(self._settings, section).update(values)

    def _apply_env_overrides(self) -> None:
        execution, ui = self._settings.execution, self._settings.ui
        if threads := os.getenv("EWP_SCS_THREADS"):
            try:
                execution["threads"] = int(threads)
            except ValueError:
                logger.warning(f"Ignoring EWP_SCS_THREADS={threads!r}: not an integer")
        if out_dir := os.getenv("EWP_SCS_OUT_DIR"):
            execution["out_dir"] = out_dir
        if os.getenv("EWP_SCS_VERBOSE"):
            ui["verbose"] = True
        if os.getenv("NO_COLOR"):
            ui["color_output"] = False

    def save_user_settings(self) -> None:
        """Persist the resolved settings, env overrides included, to the user file."""
        self.user_file.parent.mkdir(parents=True, exist_ok=True)
        self.user_file.write_text(json.dumps(self.to_dict(), indent=2))

    def get(self, key: str, default: Any = None) -> Any:
        """
        Look up ``section.name``; a whole section for a bare ``section``.

        Example: config.get("screening.alpha")
        """
        node: Any = self.to_dict()
        for part in key.split("."):
            if not isinstance(node, dict) or part not in node:
                return default
            node = node[part]
        return node

    def set(self, key: str, value: Any) -> None:
        """
        Assign ``section.name``. String values are decoded as JSON when they
        parse ("0.1" -> 0.1, "true" -> True) and kept as text otherwise.

        Example: config.set("screening.cov_mode", "iid")

        Raises:
            ConfigError: If the key is unknown or the value fails SETTINGS_SCHEMA
        """
        parts = key.split(".")
        if len(parts) != 2 or self.get(key) is None:
            raise ConfigError(f"Unknown setting: {key}")
        if isinstance(value, str):
            try:
                value = json.loads(value)
            except json.JSONDecodeError:
                pass
        section, name = parts
        try:
            validate(instance={section: {name: value}}, schema=SETTINGS_SCHEMA)
        except ValidationError as e:
            raise ConfigError(f"Invalid value for {key}: {e.message}") from None
        getattr(self.settings, section)[name] = value

    def reset(self) -> None:
        """Back to built-in defaults, ignoring files and environment."""
        self._settings = Settings()
        self._loaded = True

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self.settings)


_config: Optional[ConfigManager] = None


def get_config() -> ConfigManager:
    """Process-wide ConfigManager, created lazily."""
    global _config
    if _config is None:
        _config = ConfigManager()
    return _config


def init_config() -> bool:
    """Create the user settings file with defaults if missing."""
    config = get_config()
    config.load()
    if config.user_file.exists():
        return False
    config.save_user_settings()
    logger.info(f"Created config file: {config.user_file}")
    return True


# Helpers behind `ewp-scs config get|set|reset`; set and reset persist.
def config_get(key: str) -> Any:
    return get_config().get(key)


def config_set(key: str, value: Any) -> None:
    manager = get_config()
    manager.set(key, value)
    manager.save_user_settings()


def config_reset() -> None:
    manager = get_config()
    manager.reset()
    manager.save_user_settings()
