"""Empirical lithium battery model.

Three measured effects are represented as piecewise-linear curves:

* usable capacity vs. temperature,
* usable capacity vs. discharge power (relative to a reference power),
* maximum charge rate vs. temperature.

Energy bookkeeping is in joules of *nominal* stored energy. Extracting
``E`` joules when the combined extraction factor is ``f`` drains ``E / f``
from storage; the difference is lost as heat inside the cell.
"""

from __future__ import annotations

import bisect
import csv
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import NamedTuple, Sequence

from .thermal import ThermalMass
from .units import JOULES_PER_WH, c_to_k

CURVE_Y_MAX = 1.5


class BatteryError(ValueError):
    pass


@dataclass(frozen=True)
class EmpiricalCurve:
    """Piecewise-linear curve through ``(x, y)`` breakpoints, clamped at both ends."""

    xs: tuple[float, ...]
    ys: tuple[float, ...]

    def __post_init__(self):
        xs = tuple(float(x) for x in self.xs)
        ys = tuple(float(y) for y in self.ys)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)
        if len(xs) == 0 or len(xs) != len(ys):
            raise BatteryError("curve needs matching, non-empty x and y breakpoints")
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise BatteryError("curve x breakpoints must be strictly increasing")
        if any(not 0.0 <= y <= CURVE_Y_MAX for y in ys):
            raise BatteryError(f"curve y values must lie in [0, {CURVE_Y_MAX}]")

    def __call__(self, x: float) -> float:
        xs, ys = self.xs, self.ys
        if x <= xs[0]:
            return ys[0]
        if x >= xs[-1]:
            return ys[-1]
        i = bisect.bisect_right(xs, x)
        x0, x1 = xs[i - 1], xs[i]
        y0, y1 = ys[i - 1], ys[i]
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0)

    @classmethod
    def from_points(cls, points: Sequence[tuple[float, float]]) -> "EmpiricalCurve":
        return cls(tuple(p[0] for p in points), tuple(p[1] for p in points))

    @classmethod
    def from_csv(cls, path: str | Path, x_is_celsius: bool = False) -> "EmpiricalCurve":
        """Load a curve file with header ``x,y``.

        Temperature curves are stored in degrees Celsius on disk; pass
        ``x_is_celsius`` to convert them to kelvin.
        """
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [h.strip() for h in header] != ["x", "y"]:
                raise BatteryError(f"{path}: expected header 'x,y'")
            points = []
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                try:
                    x, y = (float(v) for v in row)
                except ValueError:
                    raise BatteryError(f"{path}:{lineno}: malformed row {row!r}") from None
                points.append((c_to_k(x) if x_is_celsius else x, y))
        return cls.from_points(points)


def default_temperature_capacity_curve() -> EmpiricalCurve:
    return EmpiricalCurve.from_points([(c_to_k(-20.0), 0.50), (c_to_k(0.0), 0.80), (c_to_k(25.0), 1.00)])


def default_discharge_factor_curve() -> EmpiricalCurve:
    # linear through f(1)=1.0 and f(2)=0.8, clamped to [0.5, 1.2]
    return EmpiricalCurve.from_points([(0.0, 1.20), (3.5, 0.50)])


def default_charge_rate_curve() -> EmpiricalCurve:
    return EmpiricalCurve.from_points([(c_to_k(0.0), 0.0), (c_to_k(5.0), 0.80), (c_to_k(25.0), 1.00)])


@dataclass(frozen=True)
class BatterySpec:
    nominal_capacity: float  # J
    reference_discharge_power: float  # W
    max_charge_power: float  # W at 25 C
    thermal: ThermalMass
    min_soc_fraction: float = 0.40
    discharge_floor_temp: float = c_to_k(-20.0)
    charge_floor_temp: float = c_to_k(0.0)
    shutdown_temp: float = c_to_k(60.0)
    temp_capacity_curve: EmpiricalCurve = field(default_factory=default_temperature_capacity_curve)
    discharge_factor_curve: EmpiricalCurve = field(default_factory=default_discharge_factor_curve)
    charge_rate_curve: EmpiricalCurve = field(default_factory=default_charge_rate_curve)
    charge_efficiency: float = 1.0

    def __post_init__(self):
        if not self.nominal_capacity > 0:
            raise BatteryError("nominal_capacity must be positive")
        if not self.reference_discharge_power > 0:
            raise BatteryError("reference_discharge_power must be positive")
        if self.max_charge_power < 0:
            raise BatteryError("max_charge_power must be non-negative")
        if not 0.0 <= self.min_soc_fraction < 1.0:
            raise BatteryError("min_soc_fraction must lie in [0, 1)")
        if not self.discharge_floor_temp < self.charge_floor_temp < self.shutdown_temp:
            raise BatteryError("need discharge_floor < charge_floor < shutdown temperature")
        if not 0.0 < self.charge_efficiency <= 1.0:
            raise BatteryError("charge_efficiency must lie in (0, 1]")

    @classmethod
    def from_wh(cls, capacity_wh: float, **kwargs) -> "BatterySpec":
        return cls(nominal_capacity=capacity_wh * JOULES_PER_WH, **kwargs)

    @property
    def reserve(self) -> float:
        """Energy below the minimum state of charge, never extractable (J)."""
        return self.min_soc_fraction * self.nominal_capacity


@dataclass(frozen=True)
class BatteryState:
    stored_energy: float  # J
    temperature: float  # K

    def soc(self, spec: BatterySpec) -> float:
        return self.stored_energy / spec.nominal_capacity


class SafetyGate(NamedTuple):
    discharge_allowed: bool
    charge_allowed: bool


class DischargeResult(NamedTuple):
    delivered: float  # J to the load
    drained: float  # J removed from storage
    state: BatteryState
    available: bool  # False when the discharge gate was closed


class ChargeResult(NamedTuple):
    accepted: float  # J added to storage
    drawn: float  # J taken from the source
    state: BatteryState


def usable_capacity_fraction(spec: BatterySpec, temperature: float) -> float:
    if temperature >= spec.shutdown_temp:
        return 0.0
    return spec.temp_capacity_curve(temperature)


def discharge_factor(spec: BatterySpec, power_draw: float) -> float:
    if power_draw < 0:
        raise BatteryError("power_draw must be non-negative")
    return spec.discharge_factor_curve(power_draw / spec.reference_discharge_power)


def extraction_factor(spec: BatterySpec, temperature: float, power_draw: float) -> float:
    """Delivered-to-drained ratio: product of the two derating effects, capped at 1.

    A slow discharge can win back capacity lost to the cold, but it never
    yields more than the nominal stored energy.
    """
    return min(1.0, usable_capacity_fraction(spec, temperature) * discharge_factor(spec, power_draw))


def max_charge_fraction(spec: BatterySpec, temperature: float) -> float:
    if temperature <= spec.charge_floor_temp or temperature >= spec.shutdown_temp:
        return 0.0
    return spec.charge_rate_curve(temperature)


def safety_gate(spec: BatterySpec, temperature: float) -> SafetyGate:
    return SafetyGate(
        discharge_allowed=spec.discharge_floor_temp <= temperature < spec.shutdown_temp,
        charge_allowed=spec.charge_floor_temp < temperature < spec.shutdown_temp,
    )


def available_energy(spec: BatterySpec, state: BatteryState, power_draw: float) -> float:
    """Energy (J) the load could still extract at ``power_draw`` and the current temperature."""
    if not safety_gate(spec, state.temperature).discharge_allowed:
        return 0.0
    above_reserve = state.stored_energy - spec.reserve
    if above_reserve <= 0:
        return 0.0
    return above_reserve * extraction_factor(spec, state.temperature, power_draw)


def discharge(
    spec: BatterySpec, state: BatteryState, power_draw: float, dt: float
) -> DischargeResult:
    if power_draw < 0 or dt <= 0:
        raise BatteryError("discharge needs power_draw >= 0 and dt > 0")
    if not safety_gate(spec, state.temperature).discharge_allowed:
        return DischargeResult(0.0, 0.0, state, False)
    factor = extraction_factor(spec, state.temperature, power_draw)
    delivered = min(power_draw * dt, available_energy(spec, state, power_draw))
    if delivered <= 0.0:
        return DischargeResult(0.0, 0.0, state, True)
    drained = delivered / factor
    # float noise must not push storage below the reserve
    stored = max(state.stored_energy - drained, min(spec.reserve, state.stored_energy))
    return DischargeResult(delivered, drained, replace(state, stored_energy=stored), True)


def charge(
    spec: BatterySpec, state: BatteryState, offered_power: float, dt: float
) -> ChargeResult:
    if offered_power < 0 or dt <= 0:
        raise BatteryError("charge needs offered_power >= 0 and dt > 0")
    rate = min(offered_power, spec.max_charge_power * max_charge_fraction(spec, state.temperature))
    headroom = spec.nominal_capacity - state.stored_energy
    accepted = min(rate * dt * spec.charge_efficiency, max(headroom, 0.0))
    if accepted <= 0.0:
        return ChargeResult(0.0, 0.0, state)
    new_state = replace(state, stored_energy=state.stored_energy + accepted)
    return ChargeResult(accepted, accepted / spec.charge_efficiency, new_state)
