"""Deterministic fixed-wing flight simulator and lateral guidance stack.

Compares two lateral trajectory-correction strategies over scripted
flight plans: aileron-only course steering (banking to correct) and
rudder-augmented heading steering (yawing while holding wings level),
scoring each by the image error of a rigidly mounted downward camera.
"""

from .angles import angle_diff, wrap_pi
from .config import ScenarioConfig, load_aircraft, load_config, load_plan
from .control import ControlCommand
from .dynamics import (
    AircraftParams,
    AircraftState,
    AirData,
    Environment,
    GustModel,
    air_data,
    gamma_terms,
    integrate_step,
    rk4_step,
    trim,
)
from .errors import (
    AirDataError,
    ConfigError,
    DomainError,
    InsufficientDataError,
    IntegrationFaultError,
    SimulatorError,
    SingularityError,
    TrimFailureError,
    UncontrollablePlantError,
    UndefinedBearingError,
)
from .guidance import FlightPlan, OrbitPlan, PathManager, PathSegment
from .metrics import ErrorStats, beta_estimate, series_stats, total_image_error
from .scenario import (
    ComparisonResult,
    FlightController,
    RunResult,
    compare_controllers,
    export_csv,
    run_scenario,
    write_comparison,
)

__version__ = "0.1.0"

__all__ = [
    "AirData",
    "AirDataError",
    "AircraftParams",
    "AircraftState",
    "ComparisonResult",
    "ConfigError",
    "ControlCommand",
    "DomainError",
    "Environment",
    "ErrorStats",
    "FlightController",
    "FlightPlan",
    "GustModel",
    "InsufficientDataError",
    "IntegrationFaultError",
    "OrbitPlan",
    "PathManager",
    "PathSegment",
    "RunResult",
    "ScenarioConfig",
    "SimulatorError",
    "SingularityError",
    "TrimFailureError",
    "UncontrollablePlantError",
    "UndefinedBearingError",
    "air_data",
    "angle_diff",
    "beta_estimate",
    "compare_controllers",
    "export_csv",
    "gamma_terms",
    "integrate_step",
    "load_aircraft",
    "load_config",
    "load_plan",
    "rk4_step",
    "run_scenario",
    "series_stats",
    "total_image_error",
    "trim",
    "wrap_pi",
    "write_comparison",
]
