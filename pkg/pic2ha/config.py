# Configuration loading (engine knobs, cache location, logging)
import json
import os

from pathlib import Path

from .logger import get_logger

CONFIG_DIR = Path(__file__).parent / "config"
CACHE_ENV_VAR = "PIC2HA_CACHE"

_logger = get_logger("pic2ha.config")


def _load_with_defaults(file_path, defaults, label):
    try:
        with open(file_path, "r") as f:
            user = json.load(f)
        merged = {**defaults, **user}
        _logger.debug("ConfigLoaded", {"config": label, "path": str(file_path)})
        return merged
    except (IOError, json.JSONDecodeError) as e:
        _logger.warning("ConfigFallback", {"config": label, "path": str(file_path), "error": str(e)})
        return dict(defaults)


def load_engine_config(file_path):
    """Loads resolution/table defaults from a JSON file."""
    defaults = {
        "default_length": 4,
        "seed_redundancy": 2,
        "table_range": [2, 12],
        "table_jobs": 1,
    }
    return _load_with_defaults(file_path, defaults, "engine")


def load_cache_config(file_path):
    """Loads resolution cache settings from a JSON file."""
    defaults = {
        "cache_dir": ".pic2ha-cache",
        "enabled": True,
    }
    return _load_with_defaults(file_path, defaults, "cache")


def load_logging_config(file_path):
    """Loads logging settings from a JSON file."""
    defaults = {
        "log_dir": None,
        "verbose": False,
    }
    return _load_with_defaults(file_path, defaults, "logging")


def resolve_cache_dir(flag_value, cache_config, environ=None):
    """CLI flag wins over PIC2HA_CACHE, which wins over the JSON config."""
    environ = os.environ if environ is None else environ
    if flag_value:
        return flag_value
    if environ.get(CACHE_ENV_VAR):
        return environ[CACHE_ENV_VAR]
    return cache_config["cache_dir"]


class Config:
    """A class to hold the application configuration."""
    def __init__(self, config_dir=CONFIG_DIR):
        config_dir = Path(config_dir)
        self.engine_config = load_engine_config(config_dir / "engine.json")
        self.cache_config = load_cache_config(config_dir / "cache.json")
        self.logging_config = load_logging_config(config_dir / "logging.json")


def load_config(config_dir=CONFIG_DIR):
    """Load all configurations."""
    return Config(config_dir)
