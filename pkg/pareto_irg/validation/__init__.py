"""
Run configuration: defaults, environment, config file and CLI merging
"""

from .config import (
    RunConfig,
    load_config,
    parse_pgf_grid,
    parse_statistics,
    read_config_file,
)

__all__ = [
    'RunConfig',
    'load_config',
    'read_config_file',
    'parse_pgf_grid',
    'parse_statistics',
]
