from .config import ConfigError, ConstellationConfig, EvalConfig, ScenarioConfig, with_seed
from .evaluation import AccuracyReport, confusion, parse_report, prediction_accuracy
from .simulation import World, format_table, run_many, run_scenario, sweep
from .traces import read_trace

__all__ = [
    "AccuracyReport",
    "ConfigError",
    "ConstellationConfig",
    "EvalConfig",
    "ScenarioConfig",
    "World",
    "confusion",
    "format_table",
    "parse_report",
    "prediction_accuracy",
    "read_trace",
    "run_many",
    "run_scenario",
    "sweep",
    "with_seed",
]
