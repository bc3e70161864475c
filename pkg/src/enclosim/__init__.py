"""Trace-driven simulator for solar and battery powered computers in insulated enclosures."""

from .battery import BatterySpec, BatteryState
from .compute import ProcessorSpec
from .engine import MetricsReport, RunResult, Scenario, Simulator, Trajectory, run
from .policies import (
    ConstantUtilization,
    DutyCycleEnergyProportional,
    MultiExitRounds,
    MultiExitSpec,
    PlannedSchedule,
    SchedulePlan,
)
from .thermal import EnclosureSpec, FanSpec, ThermalMass
from .traces import Trace, parse_trace, write_trace
from .units import convert_units

__version__ = "0.1.0"

__all__ = [
    "BatterySpec",
    "BatteryState",
    "ConstantUtilization",
    "DutyCycleEnergyProportional",
    "EnclosureSpec",
    "FanSpec",
    "MetricsReport",
    "MultiExitRounds",
    "MultiExitSpec",
    "PlannedSchedule",
    "ProcessorSpec",
    "RunResult",
    "Scenario",
    "SchedulePlan",
    "Simulator",
    "ThermalMass",
    "Trace",
    "Trajectory",
    "convert_units",
    "parse_trace",
    "run",
    "write_trace",
]
