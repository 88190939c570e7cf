"""Laser phase-noise quantum random number generator: simulation and digital pipeline."""
from .config import ScenarioConfig, ideal_scenario, reference_scenario
from .errors import ConfigError, ContractViolationError, InvalidParameterError, UndefinedNormalizationError

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "ContractViolationError", "InvalidParameterError", "ScenarioConfig",
    "UndefinedNormalizationError", "ideal_scenario", "reference_scenario",
]
