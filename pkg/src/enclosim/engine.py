"""Time-stepped coupling of the enclosure, battery and processor models.

Each step runs in a fixed order:

1. read ambient temperature and solar power at the step start;
2. the policy proposes a utilization and the fan controller sizes airflow;
3. battery gates, the compute cutoff and the energy on hand curtail the
   utilization (largest feasible value, then idle, then off);
4. solar feeds the load first, the battery covers any deficit and surplus
   solar charges the battery;
5. the enclosure temperature advances with the processor heat and the fan
   dissipation;
6. a :class:`StepRecord` is emitted.

Gating always uses the start-of-step enclosure temperature.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import NamedTuple

import numpy as np

from . import kernel
from .battery import BatterySpec, BatteryState, available_energy
from .compute import ProcessorSpec, power_at
from .policies import Controller, Policy, StepContext
from .thermal import (
    C_AIR_CONSTANT_VOLUME,
    EnclosureSpec,
    FanSpec,
    ThermalMass,
    check_step,
    enclosure_aggregate,
    sealed_air_mass,
)
from .traces import Trace, format_timestamp
from .units import c_to_k

PULL_DOWN_STEPS = 10  # fan drains excess heat over ~10 steps


class SimulationError(ValueError):
    pass


@dataclass(frozen=True)
class Scenario:
    enclosure: EnclosureSpec
    battery: BatterySpec
    processor: ProcessorSpec
    temperature_trace: Trace
    solar_trace: Trace
    policy: Policy
    fan: FanSpec | None = None
    dt: float = 60.0
    start: float | None = None  # defaults to the temperature trace start
    duration: float = 86400.0
    initial_t_enc: float | None = None  # defaults to ambient at start
    initial_stored_energy: float | None = None  # defaults to a full battery
    fan_setpoint: float = c_to_k(25.0)
    compute_cutoff: float = c_to_k(60.0)
    resume_temperature: float = c_to_k(55.0)
    availability_threshold: float = 0.0
    fan_approach: float = 5.0  # K; the fan never chases ambient closer than this
    fan_heat_to_enclosure: bool = False
    name: str = ""

    def __post_init__(self):
        if self.dt <= 0:
            raise SimulationError("dt must be positive")
        if self.duration < 0:
            raise SimulationError("duration must be non-negative")
        if self.resume_temperature > self.compute_cutoff:
            raise SimulationError("resume temperature must not exceed the compute cutoff")
        if not 0.0 <= self.availability_threshold <= 1.0:
            raise SimulationError("availability_threshold must lie in [0, 1]")
        if self.fan_approach < 0:
            raise SimulationError("fan_approach must be non-negative")
        if self.initial_stored_energy is not None and not (
            0.0 <= self.initial_stored_energy <= self.battery.nominal_capacity
        ):
            raise SimulationError("initial stored energy outside [0, capacity]")
        check_step(self.dt, self.heat_capacity, self.enclosure.ua)

    @property
    def air(self) -> ThermalMass:
        return ThermalMass(sealed_air_mass(self.enclosure.side_length), C_AIR_CONSTANT_VOLUME)

    @property
    def heat_capacity(self) -> float:
        m, c = enclosure_aggregate(self.air, self.battery.thermal, self.processor.thermal)
        return m * c

    @property
    def start_time(self) -> float:
        return self.temperature_trace.start if self.start is None else self.start

    @property
    def steps(self) -> int:
        return int(math.floor(self.duration / self.dt + 1e-9))

    def with_(self, **changes) -> "Scenario":
        from dataclasses import replace

        return replace(self, **changes)


class SimState(NamedTuple):
    t_enc: float
    stored_energy: float
    halted: bool = False  # compute cutoff latched


@dataclass(frozen=True)
class StepRecord:
    """One simulation step.

    ``t_enc`` is the start-of-step enclosure temperature (the one used for
    gating); ``stored_energy`` is the value after the step's energy flows.
    Energies are joules for the step, powers are watts.
    """

    time: float
    t_amb: float
    t_enc: float
    u_requested: float
    u_actual: float
    processor_power: float
    fan_power: float
    fan_airflow: float
    solar_power: float
    energy_charged: float
    energy_discharged: float
    stored_energy: float
    available: bool
    work_done: float
    energy_drained: float
    solar_used: float
    powered: bool


RECORD_FIELDS = tuple(f.name for f in fields(StepRecord))
_BOOL_FIELDS = {"available", "powered"}


class Trajectory:
    """Column store of :class:`StepRecord` values."""

    def __init__(self, columns: dict[str, np.ndarray], dt: float):
        missing = set(RECORD_FIELDS) - set(columns)
        if missing:
            raise SimulationError(f"trajectory missing columns {sorted(missing)}")
        self.columns = {
            name: np.asarray(columns[name], dtype=bool if name in _BOOL_FIELDS else float)
            for name in RECORD_FIELDS
        }
        self.dt = float(dt)

    def __len__(self):
        return len(self.columns["time"])

    def __getitem__(self, name: str) -> np.ndarray:
        return self.columns[name]

    def __eq__(self, other):
        if not isinstance(other, Trajectory):
            return NotImplemented
        return self.dt == other.dt and all(
            np.array_equal(self.columns[n], other.columns[n]) for n in RECORD_FIELDS
        )

    def record(self, i: int) -> StepRecord:
        return _record_from_row([self.columns[n][i] for n in RECORD_FIELDS])

    def records(self) -> list[StepRecord]:
        return [self.record(i) for i in range(len(self))]

    @classmethod
    def from_records(cls, records: list[StepRecord], dt: float) -> "Trajectory":
        cols = {n: [getattr(r, n) for r in records] for n in RECORD_FIELDS}
        return cls(cols, dt)

    @property
    def horizon_hours(self) -> float:
        return len(self) * self.dt / 3600.0

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(("timestamp", "step_s") + RECORD_FIELDS[1:])
            cols = [self.columns[n] for n in RECORD_FIELDS]
            for i in range(len(self)):
                row = [format_timestamp(cols[0][i]), repr(self.dt)]
                for name, col in zip(RECORD_FIELDS[1:], cols[1:]):
                    row.append(str(int(col[i])) if name in _BOOL_FIELDS else repr(float(col[i])))
                writer.writerow(row)

    @classmethod
    def from_csv(cls, path: str | Path) -> "Trajectory":
        from .traces import parse_timestamp

        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            expected = ["timestamp", "step_s"] + list(RECORD_FIELDS[1:])
            if header != expected:
                raise SimulationError(f"{path}: unexpected trajectory header")
            cols: dict[str, list] = {n: [] for n in RECORD_FIELDS}
            dt = None
            for row in reader:
                cols["time"].append(parse_timestamp(row[0]))
                dt = float(row[1])
                for name, cell in zip(RECORD_FIELDS[1:], row[2:]):
                    cols[name].append(bool(int(cell)) if name in _BOOL_FIELDS else float(cell))
        return cls(cols, dt if dt is not None else 0.0)


@dataclass
class MetricsReport:
    energy_efficiency: float | None  # %, None when nothing was drawn from storage
    availability: float  # %
    work_rate: float  # work units per hour
    total_work: float
    total_fan_energy: float  # J
    total_compute_energy: float  # J
    degenerate: bool = False

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "MetricsReport":
        return cls(**json.loads(text))


@dataclass
class RunResult:
    trajectory: Trajectory
    metrics: MetricsReport
    final_state: SimState
    extras: dict = field(default_factory=dict)


class FanOutput(NamedTuple):
    q_diss: float
    power: float
    airflow: float
    cannot_cool: bool


def _curve_arrays(curve) -> tuple[np.ndarray, np.ndarray]:
    return np.asarray(curve.xs, dtype=float), np.asarray(curve.ys, dtype=float)


class Simulator:
    """Precomputed constants and sampled traces for one scenario."""

    def __init__(self, scenario: Scenario):
        self.scenario = sc = scenario
        self.dt = sc.dt
        self.processor: ProcessorSpec = sc.processor
        self.battery: BatterySpec = sc.battery
        self.ua = sc.enclosure.ua
        self.heat_capacity = sc.heat_capacity
        n = sc.steps
        self.times = sc.start_time + sc.dt * np.arange(n)
        self.end_time = sc.start_time + n * sc.dt
        if n:
            self.t_amb = sc.temperature_trace.sample(self.times)
            self.solar = np.maximum(sc.solar_trace.sample(self.times), 0.0)
        else:
            self.t_amb = np.zeros(0)
            self.solar = np.zeros(0)
        proc, bat, fan = sc.processor, sc.battery, sc.fan
        self.max_processor_power = proc.unit_count * proc.max_power

        p = np.zeros(kernel.N_PARAMS)
        p[kernel.DT] = sc.dt
        p[kernel.UA] = self.ua
        p[kernel.HEAT_CAP] = self.heat_capacity
        p[kernel.BASE_POWER] = proc.unit_count * proc.base_power
        p[kernel.POWER_SPAN] = proc.unit_count * (proc.max_power - proc.base_power)
        p[kernel.UNIT_COUNT] = proc.unit_count
        p[kernel.RESERVE] = bat.reserve
        p[kernel.CAPACITY] = bat.nominal_capacity
        p[kernel.DISCHARGE_FLOOR] = bat.discharge_floor_temp
        p[kernel.CHARGE_FLOOR] = bat.charge_floor_temp
        p[kernel.SHUTDOWN] = bat.shutdown_temp
        p[kernel.REF_POWER] = bat.reference_discharge_power
        p[kernel.MAX_CHARGE] = bat.max_charge_power
        p[kernel.CHARGE_EFF] = bat.charge_efficiency
        p[kernel.SETPOINT] = sc.fan_setpoint
        p[kernel.APPROACH] = sc.fan_approach
        if fan is not None:
            p[kernel.HAS_FAN] = 1.0
            p[kernel.FAN_P] = fan.rated_power
            p[kernel.FAN_AF] = fan.rated_airflow
            p[kernel.FAN_MAX_AF] = fan.max_airflow
        p[kernel.CUTOFF] = sc.compute_cutoff
        p[kernel.RESUME] = sc.resume_temperature
        p[kernel.AVAIL_U] = sc.availability_threshold
        p[kernel.FAN_HEAT] = 1.0 if sc.fan_heat_to_enclosure else 0.0
        p[kernel.PULL_STEPS] = PULL_DOWN_STEPS
        self.params = p
        self.curves = (
            *_curve_arrays(bat.temp_capacity_curve),
            *_curve_arrays(bat.discharge_factor_curve),
            *_curve_arrays(bat.charge_rate_curve),
        )
        self._row = np.empty(kernel.N_COLUMNS)

    def initial_state(self) -> SimState:
        sc = self.scenario
        t0 = sc.initial_t_enc
        if t0 is None:
            t0 = sc.temperature_trace.at(sc.start_time)
        e0 = sc.battery.nominal_capacity if sc.initial_stored_energy is None else sc.initial_stored_energy
        return SimState(float(t0), float(e0), False)

    def gauge_energy(self, stored_energy: float, temperature: float) -> float:
        """Fuel-gauge reading: extractable energy at the reference discharge power."""
        b = self.battery
        return available_energy(b, BatteryState(stored_energy, temperature), b.reference_discharge_power)

    def fan_controller(self, t_enc: float, t_amb: float, heat: float, enabled: bool = True) -> FanOutput:
        """Airflow needed to hold the enclosure at its target temperature.

        The target is the setpoint, but never closer to ambient than
        ``fan_approach``. The fan removes the processor heat not already
        leaving through the walls plus a pull-down term that drains excess
        stored heat over ``PULL_DOWN_STEPS`` steps.
        """
        q, power, airflow, cannot = kernel.fan_output(self.params, t_enc, t_amb, heat, enabled)
        return FanOutput(q, power, airflow, bool(cannot))

    def advance(self, state: SimState, i: int, u_req: float, fan_enabled: bool = True) -> tuple[SimState, tuple]:
        """One step from ``state`` at step index ``i``; returns the new state and a record tuple."""
        if not 0.0 <= u_req <= 1.0:
            raise SimulationError(f"policy requested utilization {u_req!r} outside [0, 1]")
        row = self._row
        t_enc, stored, halted = kernel.advance(
            self.params, *self.curves,
            state.t_enc, state.stored_energy, state.halted,
            float(self.times[i]), float(self.t_amb[i]), float(self.solar[i]),
            float(u_req), bool(fan_enabled), row,
        )
        rec = tuple(row.tolist())
        return SimState(t_enc, stored, halted), rec

    def run(self, state: SimState | None = None, controller: Controller | None = None) -> RunResult:
        sc = self.scenario
        state = self.initial_state() if state is None else state
        n = len(self.times)
        open_loop = sc.policy.open_loop(self.times) if controller is None else None
        if open_loop is not None:
            u = np.asarray(open_loop, dtype=float)
            if np.any((u < 0) | (u > 1)):
                raise SimulationError("policy requested utilization outside [0, 1]")
            out, t_enc, stored, halted = kernel.run_open_loop(
                self.params, *self.curves, self.times, self.t_amb, self.solar, u,
                state.t_enc, state.stored_energy, state.halted,
            )
            state = SimState(float(t_enc), float(stored), bool(halted))
        else:
            if controller is None:
                controller = sc.policy.start(self)
            out = np.empty((n, kernel.N_COLUMNS))
            t_amb, solar, times = self.t_amb, self.solar, self.times
            for i in range(n):
                ctx = StepContext(i, float(times[i]), float(t_amb[i]), float(solar[i]), state.t_enc, state.stored_energy)
                decision = controller.decide(ctx)
                state, rec = self.advance(state, i, decision.utilization, decision.fan_enabled)
                out[i] = rec
                controller.observe(rec[4], rec[13], bool(rec[16]))
        trajectory = Trajectory({name: out[:, k] for k, name in enumerate(RECORD_FIELDS)}, self.dt)
        extras = {}
        if controller is not None and hasattr(controller, "finish"):
            extras["controller"] = controller.finish()
        return RunResult(trajectory, compute_metrics(trajectory), state, extras)


def step(scenario: Scenario, state: SimState, t: float) -> tuple[SimState, StepRecord]:
    """Advance one step starting at time ``t`` (must fall on the scenario's step grid)."""
    sim = Simulator(scenario)
    i = int(round((t - scenario.start_time) / scenario.dt))
    if not 0 <= i < len(sim.times) or abs(sim.times[i] - t) > 1e-6:
        raise SimulationError(f"time {format_timestamp(t)} is not a step of this scenario")
    controller = scenario.policy.start(sim)
    ctx = StepContext(i, float(sim.times[i]), float(sim.t_amb[i]), float(sim.solar[i]), state.t_enc, state.stored_energy)
    decision = controller.decide(ctx)
    new_state, rec = sim.advance(state, i, decision.utilization, decision.fan_enabled)
    return new_state, _record_from_row(rec)


def _record_from_row(row) -> StepRecord:
    return StepRecord(*(bool(v) if name in _BOOL_FIELDS else float(v) for name, v in zip(RECORD_FIELDS, row)))


def fan_controller(scenario: Scenario, state: SimState, t_amb: float, u: float) -> FanOutput:
    """Fan response for enclosure state ``state`` at ambient ``t_amb`` with the processor at ``u``."""
    sim = Simulator(scenario.with_(duration=0.0))
    return sim.fan_controller(state.t_enc, t_amb, power_at(scenario.processor, u))


def run(scenario: Scenario) -> RunResult:
    return Simulator(scenario).run()


# --- metrics ---------------------------------------------------------------


def compute_energy_from_battery(trajectory: Trajectory) -> np.ndarray:
    """Per-step share of battery delivery that went to the processor."""
    p = trajectory["processor_power"]
    fan = trajectory["fan_power"]
    total = p + fan
    share = np.divide(p, total, out=np.zeros_like(p), where=total > 0)
    return trajectory["energy_discharged"] * share


def energy_efficiency(trajectory: Trajectory) -> float | None:
    """Percent of the energy drained from storage that powered computation."""
    drained = float(np.sum(trajectory["energy_drained"]))
    if drained <= 0:
        return None
    return 100.0 * float(np.sum(compute_energy_from_battery(trajectory))) / drained


def availability(trajectory: Trajectory, u_min: float | None = None) -> float:
    """Percent of steps the system was up at or above the threshold.

    With ``u_min`` left as ``None`` the per-step flag computed by the engine
    is used.
    """
    if len(trajectory) == 0:
        return 100.0
    if u_min is None:
        up = trajectory["available"]
    else:
        threshold = np.minimum(u_min, trajectory["u_requested"])
        up = trajectory["powered"] & (trajectory["u_actual"] >= threshold - 1e-12)
    return 100.0 * float(np.count_nonzero(up)) / len(trajectory)


def work_rate_per_hour(trajectory: Trajectory) -> float:
    hours = trajectory.horizon_hours
    return float(np.sum(trajectory["work_done"])) / hours if hours > 0 else 0.0


def compute_metrics(trajectory: Trajectory) -> MetricsReport:
    if len(trajectory) == 0:
        return MetricsReport(None, 100.0, 0.0, 0.0, 0.0, 0.0, degenerate=True)
    dt = trajectory.dt
    return MetricsReport(
        energy_efficiency=energy_efficiency(trajectory),
        availability=availability(trajectory),
        work_rate=work_rate_per_hour(trajectory),
        total_work=float(np.sum(trajectory["work_done"])),
        total_fan_energy=float(np.sum(trajectory["fan_power"]) * dt),
        total_compute_energy=float(np.sum(trajectory["processor_power"]) * dt),
    )
