"""Experiment orchestration: instance suites, runs, parameter tables and reports."""

from .commands import (
    COMMANDS,
    cmd_encode,
    cmd_fixed_params,
    cmd_gen,
    cmd_oracle,
    cmd_report,
    cmd_run,
)
from .config import ConfigError, ExperimentConfig, config_hash, load_config, settings_hash
from .main import main

__all__ = [
    "COMMANDS",
    "ConfigError",
    "ExperimentConfig",
    "cmd_encode",
    "cmd_fixed_params",
    "cmd_gen",
    "cmd_oracle",
    "cmd_report",
    "cmd_run",
    "config_hash",
    "load_config",
    "main",
    "settings_hash",
]
