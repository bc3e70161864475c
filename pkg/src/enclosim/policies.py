"""Operating policies: what utilization to request at each simulation step.

A :class:`Policy` is immutable configuration. ``start(sim)`` returns a fresh
controller for one run, so the same policy object can drive any number of
runs. Open-loop policies also expose ``open_loop(times)`` so the engine can
skip the per-step call entirely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, NamedTuple, Sequence

import numpy as np

from .compute import utilization_for_power

if TYPE_CHECKING:
    from .engine import Simulator


class PolicyError(ValueError):
    pass


class Decision(NamedTuple):
    utilization: float
    fan_enabled: bool = True


class StepContext(NamedTuple):
    index: int
    time: float
    t_amb: float
    solar: float
    t_enc: float
    stored_energy: float


class Controller:
    def decide(self, ctx: StepContext) -> Decision:
        raise NotImplementedError

    def observe(self, u_actual: float, work: float, powered: bool) -> None:
        pass


class Policy:
    def start(self, sim: "Simulator") -> Controller:
        raise NotImplementedError

    def open_loop(self, times: np.ndarray) -> np.ndarray | None:
        return None


def _check_u(u: float) -> float:
    if not 0.0 <= u <= 1.0:
        raise PolicyError(f"utilization must lie in [0, 1], got {u!r}")
    return float(u)


@dataclass(frozen=True)
class ConstantUtilization(Policy):
    utilization: float

    def __post_init__(self):
        _check_u(self.utilization)

    def open_loop(self, times):
        return np.full(len(times), self.utilization)

    def start(self, sim):
        return _OpenLoopController(self.open_loop(sim.times))


@dataclass(frozen=True)
class SchedulePlan:
    """Per-slot utilization starting at ``start`` (POSIX s)."""

    start: float
    slot_duration: float
    utilizations: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "utilizations", tuple(_check_u(u) for u in self.utilizations))
        if self.slot_duration <= 0:
            raise PolicyError("slot_duration must be positive")

    def __len__(self):
        return len(self.utilizations)

    @property
    def end(self) -> float:
        return self.start + self.slot_duration * len(self.utilizations)

    def utilization_hours(self) -> float:
        return sum(self.utilizations) * self.slot_duration / 3600.0

    def slot_of(self, t: float) -> int:
        return int(math.floor((t - self.start) / self.slot_duration + 1e-9))

    def replace_utilizations(self, utilizations: Sequence[float]) -> "SchedulePlan":
        return SchedulePlan(self.start, self.slot_duration, tuple(utilizations))


@dataclass(frozen=True)
class PlannedSchedule(Policy):
    """Follow a slot plan; outside the plan the system idles at u = 0."""

    plan: SchedulePlan

    def open_loop(self, times):
        plan = self.plan
        idx = np.floor((np.asarray(times) - plan.start) / plan.slot_duration + 1e-9).astype(int)
        u = np.zeros(len(idx))
        inside = (idx >= 0) & (idx < len(plan))
        u[inside] = np.asarray(plan.utilizations)[idx[inside]]
        return u

    def start(self, sim):
        return _OpenLoopController(self.open_loop(sim.times))


class _OpenLoopController(Controller):
    def __init__(self, u: np.ndarray):
        self.u = u

    def decide(self, ctx):
        return Decision(float(self.u[ctx.index]))


@dataclass(frozen=True)
class DutyCycleEnergyProportional(Policy):
    """Thermal-agnostic duty cycling driven only by the energy on hand.

    Each step the policy spends the battery evenly over the time left until
    ``horizon_end`` on top of whatever the sun delivers right now. The battery
    reading is the fuel-gauge value at the present temperature; the policy
    does not anticipate how its own heat or the weather will change that.
    """

    horizon_end: float | None = None
    max_utilization: float = 1.0

    def start(self, sim):
        end = self.horizon_end if self.horizon_end is not None else sim.end_time
        return _DutyCycleController(sim, end, _check_u(self.max_utilization))


class _DutyCycleController(Controller):
    def __init__(self, sim: "Simulator", end: float, u_max: float):
        self.sim = sim
        self.end = end
        self.u_max = u_max

    def decide(self, ctx):
        sim = self.sim
        remaining = max(self.end - ctx.time, sim.dt)
        reading = sim.gauge_energy(ctx.stored_energy, ctx.t_enc)
        budget_power = ctx.solar + reading / remaining
        u = utilization_for_power(sim.processor, budget_power)
        return Decision(min(u, self.u_max))


def geometric_stage_costs(first: float, ratio: float, stages: int = 7) -> tuple[float, ...]:
    return tuple(first * ratio**k for k in range(stages))


@dataclass(frozen=True)
class MultiExitSpec:
    """Per-round training job that can stop after any of ``len(stage_costs)`` stages.

    ``stage_costs[k]`` is the energy (J) needed to finish stage ``k + 1``,
    run at full utilization. ``stage_work`` defaults to the stage number.
    """

    stage_costs: tuple[float, ...]
    round_period: float = 3600.0
    stage_work: tuple[float, ...] = field(default=())

    def __post_init__(self):
        costs = tuple(float(c) for c in self.stage_costs)
        object.__setattr__(self, "stage_costs", costs)
        if not costs or costs[0] <= 0 or any(b <= a for a, b in zip(costs, costs[1:])):
            raise PolicyError("stage costs must be positive and strictly increasing")
        if not self.stage_work:
            object.__setattr__(self, "stage_work", tuple(float(k + 1) for k in range(len(costs))))
        if len(self.stage_work) != len(costs):
            raise PolicyError("stage_work must match stage_costs")
        if self.round_period <= 0:
            raise PolicyError("round_period must be positive")

    @property
    def stages(self) -> int:
        return len(self.stage_costs)


def exit_stage_selection(energy_budget: float, spec: MultiExitSpec) -> int:
    """Highest stage whose cost fits the budget; 0 means skip the round."""
    if energy_budget < 0:
        raise PolicyError("energy budget must be non-negative")
    stage = 0
    for k, cost in enumerate(spec.stage_costs, start=1):
        if cost <= energy_budget:
            stage = k
        else:
            break
    return stage


@dataclass(frozen=True)
class MultiExitRounds(Policy):
    """Periodic training rounds whose exit stage is picked from an energy budget.

    Thermal-agnostic budgeting splits the nominal stored energy evenly over
    the remaining rounds. Thermal-aware budgeting splits the energy actually
    extractable at the present enclosure temperature, so a cold battery is
    not over-committed early and left empty for later rounds.

    ``budget_window`` (s) caps how far ahead stored energy is spread; ``None``
    spreads it over every round left before ``horizon_end``.
    """

    spec: MultiExitSpec
    thermal_aware: bool = False
    horizon_end: float | None = None
    budget_window: float | None = None

    def __post_init__(self):
        if self.budget_window is not None and self.budget_window <= 0:
            raise PolicyError("budget_window must be positive")

    def start(self, sim):
        end = self.horizon_end if self.horizon_end is not None else sim.end_time
        return _MultiExitController(sim, self.spec, self.thermal_aware, end, self.budget_window)


class _MultiExitController(Controller):
    def __init__(self, sim, spec: MultiExitSpec, aware: bool, end: float, window: float | None = None):
        self.sim = sim
        self.window = window
        self.spec = spec
        self.aware = aware
        self.end = end
        self.round_start = None
        self.stage = 0
        self.remaining_work = 0.0
        self.failed = False
        self.stages: list[int] = []
        self.full_power = sim.max_processor_power

    def _budget(self, ctx: StepContext) -> float:
        sim, spec = self.sim, self.spec
        ahead = self.end - ctx.time
        if self.window is not None:
            ahead = min(ahead, self.window)
        rounds_left = max(1, math.ceil(ahead / spec.round_period - 1e-9))
        solar_round = ctx.solar * spec.round_period
        if self.aware:
            stored = sim.gauge_energy(ctx.stored_energy, ctx.t_enc)
        else:
            stored = max(0.0, ctx.stored_energy - sim.scenario.battery.reserve)
        return stored / rounds_left + solar_round

    def _close_round(self):
        if self.round_start is not None:
            done = self.stage > 0 and not self.failed and self.remaining_work <= 1e-9
            self.stages.append(self.stage if done else 0)

    def decide(self, ctx):
        spec = self.spec
        if self.round_start is None or ctx.time >= self.round_start + spec.round_period - 1e-9:
            self._close_round()
            self.round_start = ctx.time
            self.failed = False
            self.stage = exit_stage_selection(self._budget(ctx), spec)
            # work units at u=1 equal device-seconds, so the job length follows from its energy
            cost = spec.stage_costs[self.stage - 1] if self.stage else 0.0
            self.remaining_work = cost / self.full_power * self.sim.processor.unit_count
        if self.remaining_work > 1e-9 and not self.failed:
            return Decision(1.0)
        return Decision(0.0)

    def observe(self, u_actual, work, powered):
        if self.remaining_work > 1e-9 and not self.failed:
            if u_actual < 1.0 - 1e-9:
                self.failed = True
            self.remaining_work -= work

    def finish(self) -> list[int]:
        self._close_round()
        self.round_start = None
        return self.stages
