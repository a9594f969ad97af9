__all__ = [
    "__version__",
    "AbstractController",
    "AttitudeController",
    "BaseReporter",
    "ElevatorController",
    "LoggingReporter",
    "OmniThrustController",
    "ScriptController",
    "SimulationError",
    "SimulationFailed",
    "Simulator",
    "TrajectoryLog",
    "export_log",
    "load_scenario",
    "loads_scenario",
    "read_log",
]

__version__ = "0.1.0.dev0"


from .controllers import (
    AbstractController,
    AttitudeController,
    ElevatorController,
    OmniThrustController,
    ScriptController,
)
from .export import export_log, read_log
from .reporters import BaseReporter, LoggingReporter
from .scenarios import load_scenario, loads_scenario
from .simulators import SimulationError, SimulationFailed, Simulator
from .structs import TrajectoryLog
