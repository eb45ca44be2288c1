"""Scenario configuration, experiment runners and the verification suite."""

from .config import KINDS, ScenarioConfig, build_config, load_config, parse_text, parse_value
from .scenarios import OUTPUT_ENV, Check, ScenarioReport, output_root, run_scenario
from .verify import SuiteReport, verify_all

__all__ = [
    "KINDS",
    "OUTPUT_ENV",
    "Check",
    "ScenarioConfig",
    "ScenarioReport",
    "SuiteReport",
    "build_config",
    "load_config",
    "output_root",
    "parse_text",
    "parse_value",
    "run_scenario",
    "verify_all",
]
