"""Scenario configuration, presets, Monte-Carlo runner and result files."""

from .config import (ChannelConfig, ScenarioConfig, apply_env_overrides, load_config,
                     save_config, validate_config)
from .presets import PRESETS, preset, resolvable
from .results import emit_results, load_ber_csv, load_results
from .runner import TrialOutcome, TrialReport, run_scenario, run_trial

__all__ = [
    "ChannelConfig", "ScenarioConfig", "apply_env_overrides", "load_config", "save_config",
    "validate_config", "PRESETS", "preset", "resolvable", "emit_results", "load_ber_csv",
    "load_results", "TrialOutcome", "TrialReport", "run_scenario", "run_trial",
]
