"""Run configuration: JSON files from a config directory plus environment overrides."""

import json
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv

logger = logging.getLogger(__name__)

ENV_PREFIX = "BORDERED_KHOVANOV_"
CONFIG_FILES = ["run_config.json", "suites_config.json"]
DEFAULT_CONFIG_PATH = Path(__file__).parent.parent / "config_sample"


@dataclass
class RunConfig:
    command: str = "verify"
    n: int = 2
    paths: List[str] = field(default_factory=list)
    method: str = "direct"
    json: bool = False
    seed: int = 0
    suite: Optional[str] = None
    allow_large: bool = False
    suites_config: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_configs(cls, configs: Dict[str, Any], **overrides: Any) -> "RunConfig":
        """Defaults, then `run_config.json`, then environment, then explicit overrides."""
        values: Dict[str, Any] = {}
        run = configs.get("run_config", {})
        for key in cls.__dataclass_fields__:
            if key in run:
                values[key] = run[key]
        values.update(_env_overrides())
        values.update({key: value for key, value in overrides.items() if value is not None})
        values["suites_config"] = configs.get("suites_config", {}).get("suites_config", {})
        config = cls(**{key: value for key, value in values.items() if key in cls.__dataclass_fields__})
        config.n = int(config.n)
        config.seed = int(config.seed)
        config.allow_large = _as_bool(config.allow_large)
        config.json = _as_bool(config.json)
        return config

    def suite_enabled(self, module_name: str) -> bool:
        return self.suites_config.get(module_name, {}).get("enabled", True) is not False


def _as_bool(value: Any) -> bool:
    if isinstance(value, str):
        return value.strip().lower() in ("1", "true", "yes", "on")
    return bool(value)


def _env_overrides() -> Dict[str, Any]:
    """Variables named BORDERED_KHOVANOV_<KEY> override config key <key>."""
    overrides = {}
    for key, value in os.environ.items():
        if key.startswith(ENV_PREFIX):
            overrides[key[len(ENV_PREFIX):].lower()] = value
    return overrides


def load_configs(config_path: Optional[str] = None, env_path: Optional[str] = None) -> Dict[str, Any]:
    """Load every configuration file; a missing or broken file becomes {}."""
    if env_path:
        load_dotenv(env_path)
    else:
        load_dotenv()
    path = Path(config_path) if config_path else DEFAULT_CONFIG_PATH
    configs: Dict[str, Any] = {}
    for config_file in CONFIG_FILES:
        key = config_file.replace(".json", "")
        try:
            with open(path / config_file, "r", encoding="utf-8") as f:
                configs[key] = json.load(f)
        except Exception as e:
            logger.error(f"Failed to load config {config_file}: {e}")
            configs[key] = {}
    return configs
