"""Component-based MOEA/D: decomposition-based multiobjective evolutionary optimization."""

from moead.engine import AlgorithmConfig, ConfigError, RunError, RunResult, initialize_population, run_moead
from moead.metrics import hypervolume, igd, nondominated_filter, summarize
from moead.presets import preset, preset_names
from moead.problems import ProblemDefinition, make_problem
from moead.registry import (
    ComponentError,
    Registry,
    default_registry,
    get_component,
    list_components,
    register_component,
)

__all__ = [
    "AlgorithmConfig",
    "ComponentError",
    "ConfigError",
    "ProblemDefinition",
    "Registry",
    "RunError",
    "RunResult",
    "default_registry",
    "get_component",
    "hypervolume",
    "igd",
    "initialize_population",
    "list_components",
    "make_problem",
    "nondominated_filter",
    "preset",
    "preset_names",
    "register_component",
    "run_moead",
    "summarize",
]
