"""Annual energy simulation of a small office under adaptive setpoints, occupancy controls and night purge."""
from .config import ScenarioConfig, load_config, parse_config_text
from .engine import EnergyAccount, ScenarioResult, run_pair, run_scenario, run_sweep
from .errors import ConfigError, DomainError, NumericError, ParseError, StructuralError

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DomainError",
    "EnergyAccount",
    "NumericError",
    "ParseError",
    "ScenarioConfig",
    "ScenarioResult",
    "StructuralError",
    "load_config",
    "parse_config_text",
    "run_pair",
    "run_scenario",
    "run_sweep",
]
