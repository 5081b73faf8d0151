"""Configuration, sweeps, rate fits, comparisons and the command line."""

from .analysis import FieldComparison, RateFit, compare_fields, fit_rate
from .config import EXPERIMENT_KINDS, SweepConfig, format_config, load_config, parse_config
from .sweep import COLUMNS, config_geometry, epsilon_directions, read_table, run_sweep, write_table

__all__ = [
    "COLUMNS",
    "EXPERIMENT_KINDS",
    "FieldComparison",
    "RateFit",
    "SweepConfig",
    "compare_fields",
    "config_geometry",
    "epsilon_directions",
    "fit_rate",
    "format_config",
    "load_config",
    "parse_config",
    "read_table",
    "run_sweep",
    "write_table",
]
