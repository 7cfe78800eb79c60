"""
cli/config.py - Run configuration
G2 Variational Lab

Built-in defaults, overridden by a TOML file (path from --config or the
G2LAB_CONFIG environment variable), overridden in turn by command-line
flags. Unknown sections or keys are rejected.
"""

import copy
import logging
import os
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from math import pi
from typing import Optional

from errors import ConfigError
from quadrature.domains import QuadratureSpec

logger = logging.getLogger(__name__)

CONFIG_ENV = 'G2LAB_CONFIG'
LOG_LEVEL_ENV = 'G2LAB_LOG_LEVEL'
REPORT_DIR_ENV = 'G2LAB_REPORT_DIR'
DEFAULT_CONFIG_PATH = os.path.join('config', 'g2lab.toml')

DEFAULTS = {
    'quadrature': {
        'method': 'moment-reduction',
        'samples': 200_000,
        'seed': 0,
        'nodes': 64,
        'tolerance': 1e-10,
    },
    'bump': {
        'plateau': 0.3,
        'cutoff': 0.8,
    },
    'tolerances': {
        'exact': 0.0,
        'numeric': 1e-10,
        'metric_iteration': 1e-12,
        'fd_relative': 1e-4,
        'volume_rate': 1e-9,
    },
    'metric': {
        'max_iters': 50,
    },
    'coflow': {
        'grid': 256,
        'dt': 1e-6,
        'steps': 10,
        's': 1e-2,
        'cfl_factor': 0.5,
        'period': 2.0 * pi,
    },
    'unbounded': {
        'packing': 'nested-64',
        'rounds': 3,
        'nu': 'auto',
        'amplitude_grid': [1e-3, 3e-3, 1e-2, 3e-2, 1e-1, 3e-1],
    },
}


def _compatible(default, value) -> bool:
    if isinstance(default, bool):
        return isinstance(value, bool)
    if isinstance(default, float):
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if isinstance(default, int):
        return isinstance(value, int) and not isinstance(value, bool)
    if isinstance(default, list):
        return isinstance(value, list)
    if default == 'auto':
        return isinstance(value, (str, int, float))
    return isinstance(value, type(default))


def merge(config: dict, updates: dict, source: str) -> dict:
    """Apply {section: {key: value}} updates, checking names and types."""
    for section, values in updates.items():
        if section not in DEFAULTS:
            raise ConfigError(f"{source}: unknown section [{section}]")
        if not isinstance(values, dict):
            raise ConfigError(f"{source}: [{section}] must be a table")
        for key, value in values.items():
            if key not in DEFAULTS[section]:
                raise ConfigError(f"{source}: unknown key '{key}' in [{section}]")
            if value is None:
                continue
            if not _compatible(DEFAULTS[section][key], value):
                raise ConfigError(f"{source}: [{section}] {key} has the wrong type")
            config[section][key] = value
    return config


def load_config(path: Optional[str] = None, overrides: Optional[dict] = None) -> dict:
    """Defaults < TOML file < overrides."""
    config = copy.deepcopy(DEFAULTS)
    explicit = path is not None
    path = path or os.environ.get(CONFIG_ENV) or DEFAULT_CONFIG_PATH
    if os.path.exists(path):
        try:
            with open(path, 'rb') as handle:
                data = tomllib.load(handle)
        except tomllib.TOMLDecodeError as e:
            raise ConfigError(f"{path}: {e}") from e
        merge(config, data, path)
        logger.debug(f"Loaded run configuration from {path}")
    elif explicit:
        raise ConfigError(f"configuration file {path} does not exist")
    if overrides:
        merge(config, overrides, 'command line')
    return config


def quadrature_spec(config: dict) -> QuadratureSpec:
    q = config['quadrature']
    try:
        return QuadratureSpec(q['method'], int(q['samples']), int(q['seed']), int(q['nodes']),
                              float(q['tolerance']))
    except ValueError as e:
        raise ConfigError(f"[quadrature] {e}") from e


__all__ = [
    'CONFIG_ENV',
    'DEFAULTS',
    'LOG_LEVEL_ENV',
    'REPORT_DIR_ENV',
    'load_config',
    'merge',
    'quadrature_spec',
]
