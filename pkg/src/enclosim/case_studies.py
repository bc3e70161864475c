"""Policy-level case studies: solar data acquisition and multi-exit training rounds.

Both run on the bundled seasonal fixtures. The data-acquisition study
compares a duty cycle driven only by the energy on hand with a plan from the
thermal-aware scheduler that starts from that same duty cycle. The
multi-exit study compares per-round exit stages when the energy budget comes
from the nominal stored energy versus the fuel gauge at the current
temperature.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .battery import BatterySpec
from .compute import ProcessorSpec
from .engine import RunResult, Scenario, Simulator, run
from .fixtures import load_solar, load_temperature
from .policies import (
    DutyCycleEnergyProportional,
    MultiExitRounds,
    MultiExitSpec,
    PlannedSchedule,
    geometric_stage_costs,
)
from .scheduler import ForecastHorizon, plan
from .thermal import EnclosureSpec, ThermalMass
from .units import c_to_k

SEASON_NAMES = ("winter", "spring", "summer")


@dataclass(frozen=True)
class DataAcquisitionSpec:
    """Router plus single-board computer; both draw power in proportion to the acquisition rate."""

    router_base_power: float = 3.0
    router_max_power: float = 20.0
    compute_base_power: float = 2.7
    compute_max_power: float = 7.0
    data_rate_at_max: float = 1.0  # data units per second at full rate

    def __post_init__(self):
        if not 0 <= self.router_base_power <= self.router_max_power:
            raise ValueError("router base power must not exceed its max")
        if not 0 <= self.compute_base_power <= self.compute_max_power:
            raise ValueError("compute base power must not exceed its max")

    def processor(self, thermal: ThermalMass) -> ProcessorSpec:
        return ProcessorSpec(
            self.router_base_power + self.compute_base_power,
            self.router_max_power + self.compute_max_power,
            thermal,
        )

    def data_rate(self, result: RunResult) -> float:
        """Mean acquisition rate in data units per hour."""
        return self.data_rate_at_max * result.metrics.work_rate


@dataclass(frozen=True)
class FarmStation:
    """Base-station hardware around the acquisition load."""

    battery_wh: float = 4 * 12 * 44.0
    battery_mass: float = 21.0
    solar_nameplate_w: float = 120.0
    solar_derate: float = 0.4  # soiling, tilt and cloud cover against the clear-sky trace
    max_charge_power: float = 120.0
    side_length: float = 0.5
    wall_conductivity: float = 0.04
    wall_thickness: float = 0.05
    internal_convection: float = 10.0
    external_convection: float = 25.0
    electronics_mass: float = 1.5
    initial_soc: float = 0.7
    initial_t_enc_c: float | None = None
    days: int = 3
    dt: float = 300.0


def farm_scenario(season: str, spec: DataAcquisitionSpec = DataAcquisitionSpec(),
                  station: FarmStation = FarmStation()) -> Scenario:
    temps = load_temperature(season)
    solar = load_solar("farmbeats", season)
    scale = station.solar_derate * station.solar_nameplate_w / 120.0
    if scale != 1.0:
        solar = type(solar)(solar.times, solar.values * scale, solar.name)
    processor = spec.processor(ThermalMass(station.electronics_mass, 700.0))
    mid = processor.base_power + 0.5 * (processor.max_power - processor.base_power)
    battery = BatterySpec.from_wh(
        station.battery_wh,
        reference_discharge_power=mid,
        max_charge_power=station.max_charge_power,
        thermal=ThermalMass(station.battery_mass, 900.0),
    )
    enclosure = EnclosureSpec(
        station.side_length,
        wall_thickness=station.wall_thickness,
        wall_conductivity=station.wall_conductivity,
        internal_convection=station.internal_convection,
        external_convection=station.external_convection,
    )
    t0 = None if station.initial_t_enc_c is None else c_to_k(station.initial_t_enc_c)
    return Scenario(
        enclosure, battery, processor, temps, solar, DutyCycleEnergyProportional(),
        fan=None, dt=station.dt, duration=station.days * 86400.0, initial_t_enc=t0,
        initial_stored_energy=station.initial_soc * battery.nominal_capacity, name=f"farm:{season}",
    )


@dataclass(frozen=True)
class SeasonRates:
    season: str
    agnostic_rate: float
    aware_rate: float

    @property
    def gain_percent(self) -> float:
        return 0.0 if self.agnostic_rate == 0 else 100.0 * (self.aware_rate / self.agnostic_rate - 1.0)


@dataclass(frozen=True)
class DataRateComparison:
    seasons: tuple[SeasonRates, ...]
    plans: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def annual_gain_percent(self) -> float:
        """Gain of the season-averaged rate, each season weighted equally."""
        agn = sum(s.agnostic_rate for s in self.seasons)
        aware = sum(s.aware_rate for s in self.seasons)
        return 0.0 if agn == 0 else 100.0 * (aware / agn - 1.0)

    def by_season(self, name: str) -> SeasonRates:
        return next(s for s in self.seasons if s.season == name)


def hourly_pattern(result: RunResult, slot_duration: float = 3600.0) -> list[float]:
    u = result.trajectory["u_requested"]
    k = int(round(slot_duration / result.trajectory.dt))
    return [float(x) for x in u[: len(u) // k * k].reshape(-1, k).mean(axis=1)]


def data_rate_comparison(
    seasons=SEASON_NAMES,
    spec: DataAcquisitionSpec = DataAcquisitionSpec(),
    station: FarmStation = FarmStation(),
    max_rounds: int = 20,
    delta: float = 0.05,
) -> DataRateComparison:
    """Duty cycle versus thermal-aware plan, season by season.

    The planner asks for full rate in every hour and starts from the duty
    cycle's own hourly pattern, so any gain comes from moving or adding
    work where the simulator says it pays off. It must also end the window
    with at least the stored energy the duty cycle left behind; otherwise
    it would win by spending energy that belongs to the following days.
    """
    out, plans = [], {}
    for season in seasons:
        sc = farm_scenario(season, spec, station)
        agnostic = run(sc)
        n = int(sc.duration // 3600)
        horizon = ForecastHorizon.from_scenario(sc, [1.0] * n)
        floor = float(agnostic.trajectory["stored_energy"][-1])
        outcome = plan(horizon, sc, max_rounds=max_rounds, delta=delta,
                       initial=hourly_pattern(agnostic), final_energy_floor=floor)
        aware = run(sc.with_(policy=PlannedSchedule(outcome.plan)))
        plans[season] = outcome.plan
        out.append(SeasonRates(season, spec.data_rate(agnostic), spec.data_rate(aware)))
    return DataRateComparison(tuple(out), plans)


# --- multi-exit training rounds


@dataclass(frozen=True)
class EdgeNode:
    """Small learner node; defaults follow a Nano-class board in a foam box."""

    base_power: float = 1.0
    max_power: float = 10.0
    battery_wh: float = 60.0
    solar_nameplate_w: float = 20.0
    side_length: float = 0.2
    wall_conductivity: float = 0.04
    wall_thickness: float = 0.03175
    days: int = 3
    dt: float = 60.0
    initial_soc: float = 1.0
    budget_window: float | None = 3600.0  # each round may spend everything on hand


def default_exit_spec(node: EdgeNode = EdgeNode()) -> MultiExitSpec:
    # deepest exit takes half the round at full power; each shallower exit ~70% of the next
    top = node.max_power * 1800.0
    costs = geometric_stage_costs(top / 1.4**6, 1.4, 7)
    return MultiExitSpec(costs, round_period=3600.0)


def edge_scenario(season: str, node: EdgeNode = EdgeNode(), spec: MultiExitSpec | None = None,
                  thermal_aware: bool = False) -> Scenario:
    spec = spec or default_exit_spec(node)
    temps = load_temperature(season)
    solar = load_solar("farmbeats", season)
    solar = type(solar)(solar.times, solar.values * node.solar_nameplate_w / 120.0, solar.name)
    processor = ProcessorSpec(node.base_power, node.max_power, ThermalMass(0.25, 500.0))
    battery = BatterySpec.from_wh(
        node.battery_wh,
        reference_discharge_power=0.5 * (node.base_power + node.max_power),
        max_charge_power=node.solar_nameplate_w,
        thermal=ThermalMass(node.battery_wh / 150.0, 900.0),
    )
    enclosure = EnclosureSpec(node.side_length, wall_thickness=node.wall_thickness,
                              wall_conductivity=node.wall_conductivity,
                              internal_convection=10.0, external_convection=25.0)
    return Scenario(
        enclosure, battery, processor, temps, solar, MultiExitRounds(spec, thermal_aware, budget_window=node.budget_window),
        fan=None, dt=node.dt, duration=node.days * 86400.0,
        initial_stored_energy=node.initial_soc * battery.nominal_capacity, name=f"edge:{season}",
    )


def exit_stage_distribution(scenario: Scenario) -> np.ndarray:
    """Histogram of per-round exit stages; index 0 counts skipped or failed rounds."""
    policy = scenario.policy
    if not isinstance(policy, MultiExitRounds):
        raise TypeError("scenario policy must be MultiExitRounds")
    result = Simulator(scenario).run()
    stages = result.extras["controller"]
    return np.bincount(np.asarray(stages, dtype=int), minlength=policy.spec.stages + 1)


def mean_stage(histogram: np.ndarray) -> float:
    total = histogram.sum()
    return 0.0 if total == 0 else float(np.dot(np.arange(len(histogram)), histogram) / total)


@dataclass(frozen=True)
class ExitComparison:
    season: str
    agnostic: np.ndarray
    aware: np.ndarray

    @property
    def agnostic_mean(self) -> float:
        return mean_stage(self.agnostic)

    @property
    def aware_mean(self) -> float:
        return mean_stage(self.aware)


def exit_stage_comparison(season: str = "winter", node: EdgeNode = EdgeNode(),
                          spec: MultiExitSpec | None = None) -> ExitComparison:
    return ExitComparison(
        season,
        exit_stage_distribution(edge_scenario(season, node, spec, thermal_aware=False)),
        exit_stage_distribution(edge_scenario(season, node, spec, thermal_aware=True)),
    )
