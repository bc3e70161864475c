"""Processor power, heat and work-rate model."""

from __future__ import annotations

from dataclasses import dataclass

from .thermal import ThermalMass


class ComputeError(ValueError):
    pass


@dataclass(frozen=True)
class ProcessorSpec:
    """``unit_count`` identical devices whose power is affine in utilization."""

    base_power: float  # W per unit at u = 0
    max_power: float  # W per unit at u = 1
    thermal: ThermalMass
    unit_count: int = 1

    def __post_init__(self):
        if not 0.0 <= self.base_power <= self.max_power:
            raise ComputeError("need 0 <= base_power <= max_power")
        if self.unit_count < 1:
            raise ComputeError("unit_count must be >= 1")


def _check_u(u: float) -> None:
    if not 0.0 <= u <= 1.0:
        raise ComputeError(f"utilization must lie in [0, 1], got {u!r}")


def power_at(spec: ProcessorSpec, u: float) -> float:
    _check_u(u)
    return spec.unit_count * (spec.base_power + u * (spec.max_power - spec.base_power))


def heat_output(spec: ProcessorSpec, u: float) -> float:
    # no mechanical work is done; every watt drawn ends up as heat
    return power_at(spec, u)


def work_rate(spec: ProcessorSpec, u: float) -> float:
    """Work units per second; one unit is one device-second at full utilization."""
    _check_u(u)
    return spec.unit_count * u


def utilization_for_power(spec: ProcessorSpec, power: float) -> float:
    """Largest utilization whose power does not exceed ``power``, clipped to [0, 1]."""
    span = spec.unit_count * (spec.max_power - spec.base_power)
    base = spec.unit_count * spec.base_power
    if span <= 0:
        return 1.0 if power >= base else 0.0
    return min(1.0, max(0.0, (power - base) / span))


def energy_per_work(spec: ProcessorSpec, u: float) -> float:
    """Joules per work unit; infinite at u = 0."""
    rate = work_rate(spec, u)
    return float("inf") if rate == 0 else power_at(spec, u) / rate
