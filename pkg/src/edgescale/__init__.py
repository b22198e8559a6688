"""Edge microservice autoscaling sandbox.

A deterministic mobility simulator feeds a zonal location API; a
threshold decision engine polls zone occupancy and scales a mock
orchestrator deployment. Everything runs in one process, headless or
behind two HTTP listeners.
"""

from .engine import DecisionEngine, EngineConfig, desired_replicas, window_average
from .errors import (
    ConfigError,
    EdgescaleError,
    NotFoundError,
    ScenarioError,
    ValidationError,
)
from .harness import RunConfig, build_system, load_run_config, run_headless, run_live
from .orchestrator import Deployment, Orchestrator, ScaleEvent
from .rng import SplitMix64
from .runtime import SandboxRuntime
from .scenario import ScenarioConfig, UserClass, default_scenario, validate_scenario
from .simulator import Simulator

__version__ = "1.0.0"

__all__ = [
    "ConfigError",
    "DecisionEngine",
    "Deployment",
    "EdgescaleError",
    "EngineConfig",
    "NotFoundError",
    "Orchestrator",
    "RunConfig",
    "SandboxRuntime",
    "ScaleEvent",
    "ScenarioConfig",
    "ScenarioError",
    "Simulator",
    "SplitMix64",
    "UserClass",
    "ValidationError",
    "build_system",
    "default_scenario",
    "desired_replicas",
    "load_run_config",
    "run_headless",
    "run_live",
    "validate_scenario",
    "window_average",
    "__version__",
]
