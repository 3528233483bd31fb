"""
Configuration Management Module
Loads environment variables, optional TOML/JSON config files and provides
centralized solver settings
"""

import json
import os
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from copy import deepcopy
from pathlib import Path
from typing import Any, Dict, Optional

from dotenv import load_dotenv

from src.exceptions import ConfigError

# Load environment variables from .env file
load_dotenv()

# Base Directory
BASE_DIR = Path(__file__).resolve().parent.parent

# Application Settings
LOG_LEVEL = os.getenv('LOG_LEVEL', 'INFO')
LOG_TO_FILE = os.getenv('CAPRA_LOG_TO_FILE', '1') != '0'

# Directories
LOGS_DIR = BASE_DIR / os.getenv('CAPRA_LOGS_DIR', 'logs')
RESULTS_DIR = BASE_DIR / os.getenv('RESULTS_DIR', 'results')

# Ensure directories exist
LOGS_DIR.mkdir(exist_ok=True)
RESULTS_DIR.mkdir(exist_ok=True)

REPORT_SCHEMA = 'capra-report/1'

# Solver / suite defaults
SOLVER_DEFAULTS: Dict[str, Any] = {
    'seed': 0,
    'lambda_max': 1e6,
    'restarts': 32,
    'rel_tol': 1e-9,
    'zero_tol': 0.0,
    'biconj_tol': 1e-4,
    'ceiling_slack': 1e-12,
    'tie_rel_gap': 1e-9,
    'workers': 4,
    'dims': [1, 2, 3, 4, 6],
    'enumeration_cap': 10,
    'norm_vectors': 1000,
    'dual_vectors': 200,
    'l0_vectors': 1000,
    'conj_vectors': 100,
    'biconj_vectors': 200,
    'sphere_vectors': 100,
    'engine_functions': 100,
    'theorem_restarts': 4,
}


def _env_seed() -> Optional[int]:
    """
    Read the CAPRA_SEED fallback seed from the environment
    """
    raw = os.getenv('CAPRA_SEED')
    if raw is None or raw.strip() == '':
        return None
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"CAPRA_SEED must be an integer, got {raw!r}") from exc


def load_config_file(path: Path) -> Dict[str, Any]:
    """
    Load solver settings from a TOML or JSON file

    Args:
        path: Path to a .toml or .json file

    Returns:
        Dictionary of settings (only keys known to SOLVER_DEFAULTS)

    Raises:
        ConfigError: On unknown extension, unreadable file or unknown keys
    """
    path = Path(path)
    try:
        if path.suffix == '.toml':
            with open(path, 'rb') as handle:
                data = tomllib.load(handle)
        elif path.suffix == '.json':
            with open(path, 'r', encoding='utf-8') as handle:
                data = json.load(handle)
        else:
            raise ConfigError(f"Unsupported config extension '{path.suffix}' (use .toml or .json)")
    except (OSError, tomllib.TOMLDecodeError, json.JSONDecodeError) as exc:
        raise ConfigError(f"Cannot read config file {path}: {exc}") from exc

    # A [capra] table is accepted as well as top-level keys
    if isinstance(data, dict) and isinstance(data.get('capra'), dict):
        data = data['capra']
    if not isinstance(data, dict):
        raise ConfigError(f"Config file {path} must contain a table/object")

    unknown = sorted(set(data) - set(SOLVER_DEFAULTS))
    if unknown:
        raise ConfigError(f"Unknown config keys in {path}: {', '.join(unknown)}")
    return data


def resolve_settings(
    config_path: Optional[Path] = None,
    overrides: Optional[Dict[str, Any]] = None
) -> Dict[str, Any]:
    """
    Merge defaults < environment < config file < explicit overrides

    Args:
        config_path: Optional TOML/JSON config file
        overrides: Values given on the command line (None values are ignored)

    Returns:
        Fully resolved settings dictionary
    """
    settings = deepcopy(SOLVER_DEFAULTS)

    env_seed = _env_seed()
    if env_seed is not None:
        settings['seed'] = env_seed

    if config_path is not None:
        settings.update(load_config_file(config_path))

    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in SOLVER_DEFAULTS:
            raise ConfigError(f"Unknown setting '{key}'")
        settings[key] = value

    settings['dims'] = sorted({int(d) for d in settings['dims']})
    if any(d < 1 for d in settings['dims']):
        raise ConfigError(f"Dimensions must be >= 1, got {settings['dims']}")
    if settings['lambda_max'] <= 0:
        raise ConfigError("lambda_max must be positive")
    if settings['workers'] < 1:
        raise ConfigError("workers must be >= 1")
    return settings
