"""Thermal-aware workload planning over a forecast horizon.

The planner starts from the default workload pattern and repeatedly walks
the slots from last to first, moving a small amount of utilization into the
current slot from whichever slots convert stored energy into work least
efficiently. A move is kept only if a full simulation of the whole horizon
scores better, so the plan never regresses. The final plan is compared with
the naive constant-utilization schedule and falls back to it when the search
did not beat it.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .engine import RunResult, Scenario, Simulator, SimState
from .policies import ConstantUtilization, PlannedSchedule, SchedulePlan
from .traces import Trace, format_timestamp, parse_timestamp

_SCORE_RTOL = 1e-9


class SchedulerError(ValueError):
    pass


@dataclass(frozen=True)
class ForecastHorizon:
    """Per-slot forecasts; temperatures in K, solar in W, demand in utilization-hours."""

    start: float
    temperatures: tuple[float, ...]
    solar: tuple[float, ...]
    demand: tuple[float, ...]
    slot_duration: float = 3600.0

    def __post_init__(self):
        for name in ("temperatures", "solar", "demand"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))
        n = len(self.temperatures)
        if n == 0:
            raise SchedulerError("forecast horizon has no slots")
        if len(self.solar) != n or len(self.demand) != n:
            raise SchedulerError("temperature, solar and demand series must have equal length")
        if self.slot_duration <= 0:
            raise SchedulerError("slot_duration must be positive")
        if any(d < 0 for d in self.demand):
            raise SchedulerError("demand must be non-negative")

    def __len__(self):
        return len(self.temperatures)

    @property
    def end(self) -> float:
        return self.start + self.slot_duration * len(self)

    @property
    def slot_hours(self) -> float:
        return self.slot_duration / 3600.0

    @property
    def total_demand(self) -> float:
        return sum(self.demand)

    def traces(self) -> tuple[Trace, Trace]:
        """Temperature and solar traces through the slot starts, held flat over the last slot."""
        n = len(self)
        times = self.start + self.slot_duration * np.arange(n + 1)
        temps = np.array(self.temperatures + self.temperatures[-1:])
        solar = np.array(self.solar + self.solar[-1:])
        return Trace(times, temps, "forecast_temperature"), Trace(times, solar, "forecast_solar")

    @classmethod
    def from_scenario(
        cls, scenario: Scenario, demand: Sequence[float], slot_duration: float = 3600.0
    ) -> "ForecastHorizon":
        """Sample a scenario's own traces at slot starts, treating them as exact forecasts."""
        n = len(demand)
        times = scenario.start_time + slot_duration * np.arange(n)
        return cls(
            scenario.start_time,
            tuple(scenario.temperature_trace.sample(times)),
            tuple(scenario.solar_trace.sample(times)),
            tuple(demand),
            slot_duration,
        )


@dataclass(frozen=True)
class PlanOutcome:
    plan: SchedulePlan
    feasible: bool
    work_u_hours: float  # delivered work in utilization-hours
    demand_u_hours: float
    drained: float  # J
    rounds: int
    result: RunResult = field(repr=False, compare=False)
    fell_back_to_naive: bool = False


@dataclass(frozen=True)
class NaiveComparison:
    naive_work: float
    planned_work: float
    gain_percent: float


def _planning_scenario(horizon: ForecastHorizon, scenario: Scenario) -> Scenario:
    ratio = horizon.slot_duration / scenario.dt
    if abs(ratio - round(ratio)) > 1e-9 or round(ratio) < 1:
        raise SchedulerError("slot duration must be a whole multiple of the simulation step")
    temps, solar = horizon.traces()
    return scenario.with_(
        temperature_trace=temps,
        solar_trace=solar,
        start=horizon.start,
        duration=horizon.slot_duration * len(horizon),
    )


class _Evaluator:
    """Runs candidate plans on one planning scenario and scores them."""

    def __init__(self, horizon: ForecastHorizon, scenario: Scenario, final_energy_floor: float | None = None):
        self.horizon = horizon
        self.final_energy_floor = final_energy_floor
        self.scenario = _planning_scenario(horizon, scenario)
        self.steps_per_slot = int(round(horizon.slot_duration / self.scenario.dt))
        self.unit_seconds = self.scenario.processor.unit_count * 3600.0
        self.cache: dict[tuple[float, ...], tuple[tuple[float, float], RunResult]] = {}

    def plan(self, utilizations) -> SchedulePlan:
        return SchedulePlan(self.horizon.start, self.horizon.slot_duration, tuple(utilizations))

    def evaluate(self, utilizations: tuple[float, ...]):
        key = tuple(round(u, 12) for u in utilizations)
        hit = self.cache.get(key)
        if hit is None:
            sim = Simulator(self.scenario.with_(policy=PlannedSchedule(self.plan(key))))
            result = sim.run()
            work = result.metrics.total_work / self.unit_seconds
            drained = float(result.trajectory["energy_drained"].sum())
            shortfall = 0.0
            if self.final_energy_floor is not None:
                shortfall = max(0.0, self.final_energy_floor - float(result.trajectory["stored_energy"][-1]))
            score = (-shortfall, min(work, self.horizon.total_demand), -drained)
            hit = self.cache[key] = (score, result)
        return hit

    def slot_efficiency(self, result: RunResult) -> np.ndarray:
        """Work per joule drained in each slot of a simulated plan.

        A slot that drained nothing is infinitely efficient if it still did
        work (solar carried it) and worthless if it did none.
        """
        k = self.steps_per_slot
        work = result.trajectory["work_done"].reshape(-1, k).sum(axis=1)
        drain = result.trajectory["energy_drained"].reshape(-1, k).sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            eff = np.where(drain > 0, work / np.where(drain > 0, drain, 1.0), np.where(work > 0, np.inf, 0.0))
        return eff


def _better(a: tuple[float, ...], b: tuple[float, ...]) -> bool:
    """Lexicographic comparison with a relative tolerance on each component."""
    for x, y in zip(a, b):
        tol = _SCORE_RTOL * max(1.0, abs(x), abs(y))
        if x > y + tol:
            return True
        if x < y - tol:
            return False
    return False


def naive_utilization(horizon: ForecastHorizon) -> float:
    return min(1.0, horizon.total_demand / (len(horizon) * horizon.slot_hours))


def default_pattern(horizon: ForecastHorizon) -> tuple[float, ...]:
    return tuple(min(1.0, d / horizon.slot_hours) for d in horizon.demand)


def plan(
    horizon: ForecastHorizon,
    scenario: Scenario,
    max_rounds: int = 20,
    delta: float = 0.05,
    donors_per_slot: int = 3,
    initial: Sequence[float] | None = None,
    final_energy_floor: float | None = None,
) -> PlanOutcome:
    """Plan per-slot utilization to deliver the demand from the least stored energy.

    Plans are scored by (delivered work capped at the demand, minus stored
    energy drained), so when the battery cannot carry the whole demand the
    planner maximizes work, and otherwise it minimizes drain.

    ``initial`` replaces the default workload pattern as the starting point.
    While the plan requests less than the total demand, a slot may also grow
    by ``delta`` without a donor.

    ``final_energy_floor`` (J) ranks any plan that ends the horizon with less
    stored energy below every plan that does not, by the size of the
    shortfall.
    """
    if max_rounds < 0:
        raise SchedulerError("max_rounds must be non-negative")
    if not 0 < delta <= 1:
        raise SchedulerError("delta must lie in (0, 1]")
    ev = _Evaluator(horizon, scenario, final_energy_floor)
    n = len(horizon)
    if initial is None:
        u = list(default_pattern(horizon))
    else:
        if len(initial) != n:
            raise SchedulerError("initial pattern length must match the horizon")
        u = [min(1.0, max(0.0, float(x))) for x in initial]
    demand = horizon.total_demand
    score, result = ev.evaluate(tuple(u))
    rounds = 0
    for rounds in range(1, max_rounds + 1):
        changed = False
        for s in reversed(range(n)):
            if u[s] + delta > 1.0 + 1e-12:
                continue
            candidates = []
            if sum(u) * horizon.slot_hours + delta * horizon.slot_hours <= demand + 1e-9:
                candidates.append(None)
            eff = ev.slot_efficiency(result)
            donors = sorted((d for d in range(n) if d != s and u[d] >= delta - 1e-12 and eff[d] < eff[s]),
                            key=lambda d: (eff[d], d))
            candidates += donors[:donors_per_slot]
            for d in candidates:
                cand = list(u)
                cand[s] = min(1.0, cand[s] + delta)
                if d is not None:
                    cand[d] = max(0.0, cand[d] - delta)
                c_score, c_result = ev.evaluate(tuple(cand))
                if _better(c_score, score):
                    u, score, result = cand, c_score, c_result
                    changed = True
                    break
        if not changed:
            break

    naive = tuple([naive_utilization(horizon)] * n)
    naive_score, naive_result = ev.evaluate(naive)
    fell_back = False
    if not _better(score, naive_score):
        u, score, result = list(naive), naive_score, naive_result
        fell_back = True
    work = result.metrics.total_work / ev.unit_seconds
    feasible = work >= demand * (1 - 1e-6) - 1e-9
    return PlanOutcome(ev.plan(u), feasible, work, demand, -score[2], rounds, result, fell_back)


def marginal_efficiency(scenario: Scenario, state: SimState, slot_start: float, slot_duration: float, u: float) -> float:
    """Work per joule of stored energy drained when running one slot at constant ``u``.

    Returns ``inf`` when the slot drains nothing (solar covers it).
    """
    if not 0.0 < u <= 1.0:
        raise SchedulerError("u must lie in (0, 1]")
    sc = scenario.with_(start=slot_start, duration=slot_duration, policy=ConstantUtilization(u))
    result = Simulator(sc).run(state)
    drained = float(result.trajectory["energy_drained"].sum())
    work = result.metrics.total_work
    return math.inf if drained == 0 else work / drained


def compare_against_naive(horizon: ForecastHorizon, scenario: Scenario, **plan_kwargs) -> NaiveComparison:
    ev = _Evaluator(horizon, scenario)
    naive = tuple([naive_utilization(horizon)] * len(horizon))
    _, naive_result = ev.evaluate(naive)
    naive_work = naive_result.metrics.total_work
    planned_work = plan(horizon, scenario, **plan_kwargs).result.metrics.total_work
    gain = 0.0 if naive_work == 0 else 100.0 * (planned_work - naive_work) / naive_work
    return NaiveComparison(naive_work, planned_work, gain)


def write_plan(plan_: SchedulePlan, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["slot_start_iso8601", "utilization"])
        for k, u in enumerate(plan_.utilizations):
            writer.writerow([format_timestamp(plan_.start + k * plan_.slot_duration), repr(float(u))])


def read_plan(path: str | Path, slot_duration: float = 3600.0) -> SchedulePlan:
    """Read a plan CSV; ``slot_duration`` is used only when the file has a single slot."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["slot_start_iso8601", "utilization"]:
            raise SchedulerError(f"{path}: expected header 'slot_start_iso8601,utilization'")
        starts, us = [], []
        for lineno, row in enumerate(reader, start=2):
            try:
                starts.append(parse_timestamp(row[0]))
                us.append(float(row[1]))
            except (ValueError, IndexError):
                raise SchedulerError(f"{path}:{lineno}: malformed row {row!r}") from None
    if not starts:
        raise SchedulerError(f"{path}: plan has no slots")
    if len(starts) == 1:
        return SchedulePlan(starts[0], slot_duration, tuple(us))
    steps = np.diff(starts)
    if np.any(np.abs(steps - steps[0]) > 1e-6) or steps[0] <= 0:
        raise SchedulerError(f"{path}: slots must be evenly spaced")
    return SchedulePlan(starts[0], float(steps[0]), tuple(us))
