"""
Configuration
Default settings for caps, generators, refinement and file formats
"""
from typing import Any, Dict, Optional

from errors import ConfigError


DEFAULT_CONFIG: Dict[str, Any] = {
    'max_sets': 16,               # 2^n atom table
    'max_exhaustive_sets': 8,     # oracle and brute-force paths
    'generator_denom_cap': 2 ** 30,
    'default_denom_cap': 64,
    'emulate_mode': 'free',       # α_k: every block of every atom containing k
    'refine_mode': 'anchored',
    'refine_steps': 3,
    'log_level': 'INFO',
    'instance_version': 'hall-instance/1',
    'discrete_version': 'hall-discrete/1',
    'allocation_version': 'hall-allocation/1',
    'report_version': 'hall-report/1',
}

REFINE_MODES = ('free', 'anchored')


def get_config(overrides: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """Return a copy of the defaults with overrides merged in"""
    config = DEFAULT_CONFIG.copy()
    for key, value in (overrides or {}).items():
        if key not in DEFAULT_CONFIG:
            raise ConfigError(f"unknown config key {key!r}")
        if value is not None:
            config[key] = value

    for key in ('emulate_mode', 'refine_mode'):
        if config[key] not in REFINE_MODES:
            raise ConfigError(f"{key} must be one of {REFINE_MODES}, got {config[key]!r}")
    if not 1 <= config['max_exhaustive_sets'] <= config['max_sets']:
        raise ConfigError("max_exhaustive_sets must lie in [1, max_sets]")
    return config
