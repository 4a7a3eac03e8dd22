"""Configuration defaults, the config file and the environment."""
import copy
import logging
import os
import sys

import yaml
from dotenv import load_dotenv

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = "config/config.yaml"

DEFAULTS = {
    "certification": {"word_bound": 3, "exponent_bound": 2},
    "jacobian": {"samples": 10, "seed": 20240601},
    "oracle": {"trials": 100, "entry_range": 3},
    "fixed_points": {"search_radius": 2},
    "specs": {"directory": "config/specs"},
    "logging": {"level": "INFO"},
}


def _merge(base, override):
    out = copy.deepcopy(base)
    for key, value in (override or {}).items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out


def load_settings(path=None):
    """Defaults, overlaid by the YAML file, overlaid by NIELSEN_* environment variables."""
    load_dotenv()
    path = path or os.getenv("NIELSEN_CONFIG", DEFAULT_CONFIG_PATH)
    settings = copy.deepcopy(DEFAULTS)
    if os.path.exists(path):
        with open(path, "r") as f:
            settings = _merge(settings, yaml.safe_load(f) or {})
    else:
        logger.warning(f"⚠️ config file {path} not found, using built-in defaults")
    level = os.getenv("NIELSEN_LOG_LEVEL")
    if level:
        settings["logging"]["level"] = level
    return settings


def setup_logging(level="INFO"):
    """Log to stderr so that reports on stdout stay clean."""
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    root = logging.getLogger()
    root.handlers[:] = [handler]
    root.setLevel(getattr(logging, str(level).upper(), logging.INFO))
