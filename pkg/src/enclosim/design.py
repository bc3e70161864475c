"""Exhaustive design sweep over insulation, cooling and operating point.

Every configuration is simulated against every season's traces. Selection
keeps the configurations that meet the primary target in all binding seasons
and takes the lexicographic maximum of the season-averaged secondary
metrics. Remaining ties go to the smallest canonical configuration key, so
the choice never depends on the order results arrive in.
"""

from __future__ import annotations

import csv
import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .engine import MetricsReport, Scenario, run
from .policies import ConstantUtilization
from .thermal import EnclosureSpec, FanSpec
from .traces import Trace

METRICS = ("energy_efficiency", "availability", "work_rate")
_CSV_METRICS = METRICS + ("total_work", "total_fan_energy", "total_compute_energy")


class DesignError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Insulation:
    """Wall option given either as an overall U or as a (k, d) wall over the base film coefficients."""

    u_value: float | None = None
    wall_conductivity: float | None = None
    wall_thickness: float | None = None

    def __post_init__(self):
        layered = self.wall_conductivity is not None and self.wall_thickness is not None
        if (self.u_value is not None) == layered:
            raise DesignError("insulation needs either u_value or both wall_conductivity and wall_thickness")
        if self.u_value is not None and self.u_value <= 0:
            raise DesignError("u_value must be positive")

    def enclosure(self, base: EnclosureSpec) -> EnclosureSpec:
        if self.u_value is not None:
            return EnclosureSpec(base.side_length, u_value=self.u_value)
        if base.internal_convection is None or base.external_convection is None:
            raise DesignError("a (k, d) insulation needs film coefficients on the base enclosure")
        return EnclosureSpec(
            base.side_length,
            wall_thickness=self.wall_thickness,
            wall_conductivity=self.wall_conductivity,
            internal_convection=base.internal_convection,
            external_convection=base.external_convection,
        )


@dataclass(frozen=True)
class Season:
    name: str
    temperature_trace: Trace
    solar_trace: Trace


@dataclass(frozen=True)
class DesignSpace:
    insulations: tuple[Insulation, ...]
    fans: tuple[FanSpec | None, ...]
    utilizations: tuple[float, ...]

    def __post_init__(self):
        for name in ("insulations", "fans", "utilizations"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
            if not getattr(self, name):
                raise DesignError(f"design space axis {name!r} is empty")
        if any(not 0.0 < u <= 1.0 for u in self.utilizations):
            raise DesignError("operating points must lie in (0, 1]")

    def __len__(self):
        return len(self.insulations) * len(self.fans) * len(self.utilizations)


@dataclass(frozen=True)
class Configuration:
    insulation: Insulation
    fan: FanSpec | None
    utilization: float
    index: int = field(default=-1, compare=False)

    def key(self, base: EnclosureSpec | None = None) -> tuple:
        """Canonical ordering key: U value, fan size, operating point."""
        ins = self.insulation
        u = ins.u_value if ins.u_value is not None else (ins.enclosure(base).u if base else float("inf"))
        ins_key = (u, ins.wall_conductivity or 0.0, ins.wall_thickness or 0.0)
        fan_key = (0.0, 0.0, 0.0) if self.fan is None else (self.fan.max_airflow, self.fan.rated_airflow, self.fan.rated_power)
        return ins_key + fan_key + (self.utilization,)


@dataclass(frozen=True)
class Objective:
    """Primary target that every binding season must meet, plus secondaries in priority order.

    ``min_utilization`` restricts the primary to operating points at or above
    it (e.g. full availability at 50% power). ``binding_seasons`` of ``None``
    means all seasons bind.
    """

    primary_metric: str = "availability"
    target: float = 100.0
    min_utilization: float = 0.0
    secondary_metrics: tuple[str, ...] = ("energy_efficiency", "work_rate")
    binding_seasons: tuple[str, ...] | None = None
    tolerance: float = 1e-9

    def __post_init__(self):
        object.__setattr__(self, "secondary_metrics", tuple(self.secondary_metrics))
        if self.binding_seasons is not None:
            object.__setattr__(self, "binding_seasons", tuple(self.binding_seasons))
        for m in (self.primary_metric,) + self.secondary_metrics:
            if m not in METRICS:
                raise DesignError(f"unknown metric {m!r}; expected one of {METRICS}")


@dataclass(frozen=True)
class DesignResult:
    configuration: Configuration
    seasons: Mapping[str, MetricsReport]
    feasible: bool | None = None
    rank: int | None = None


@dataclass(frozen=True)
class Selection:
    selected: DesignResult | None
    ranked: tuple[DesignResult, ...]

    @property
    def feasible(self) -> bool:
        return self.selected is not None


def enumerate_configs(space: DesignSpace) -> list[Configuration]:
    """Cartesian product in a fixed order: insulation, then fan, then operating point."""
    product = itertools.product(space.insulations, space.fans, space.utilizations)
    return [Configuration(ins, fan, float(u), k) for k, (ins, fan, u) in enumerate(product)]


def scenario_for(config: Configuration, base: Scenario, season: Season) -> Scenario:
    return base.with_(
        enclosure=config.insulation.enclosure(base.enclosure),
        fan=config.fan,
        policy=ConstantUtilization(config.utilization),
        availability_threshold=config.utilization,
        temperature_trace=season.temperature_trace,
        solar_trace=season.solar_trace,
        start=None,
        name=f"{base.name}:{season.name}:{config.index}",
    )


def evaluate(config: Configuration, base: Scenario, seasons: Sequence[Season]) -> DesignResult:
    reports = {s.name: run(scenario_for(config, base, s)).metrics for s in seasons}
    return DesignResult(config, reports)


def _evaluate_packed(args):
    return evaluate(*args)


def sweep(
    space: DesignSpace, base: Scenario, seasons: Sequence[Season], workers: int | None = None
) -> list[DesignResult]:
    """Evaluate every configuration; results come back in enumeration order."""
    if not seasons:
        raise DesignError("need at least one season")
    names = [s.name for s in seasons]
    if len(set(names)) != len(names):
        raise DesignError("season names must be unique")
    configs = enumerate_configs(space)
    jobs = [(c, base, tuple(seasons)) for c in configs]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_evaluate_packed, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    return [evaluate(*job) for job in jobs]


def metric_value(report: MetricsReport, metric: str) -> float:
    value = getattr(report, metric)
    if value is None:
        # nothing was drained from storage: no stored energy was wasted
        return 100.0
    return float(value)


def _binding(result: DesignResult, objective: Objective) -> list[str]:
    if objective.binding_seasons is None:
        return sorted(result.seasons)
    missing = set(objective.binding_seasons) - set(result.seasons)
    if missing:
        raise DesignError(f"binding seasons missing from results: {sorted(missing)}")
    return list(objective.binding_seasons)


def meets_primary(result: DesignResult, objective: Objective) -> bool:
    if result.configuration.utilization < objective.min_utilization - 1e-12:
        return False
    return all(
        metric_value(result.seasons[s], objective.primary_metric) >= objective.target - objective.tolerance
        for s in _binding(result, objective)
    )


def secondary_scores(result: DesignResult, objective: Objective) -> tuple[float, ...]:
    """Season-mean of each secondary metric, in priority order."""
    names = sorted(result.seasons)
    return tuple(
        sum(metric_value(result.seasons[s], m) for s in names) / len(names) for m in objective.secondary_metrics
    )


def select(results: Iterable[DesignResult], objective: Objective, base: EnclosureSpec | None = None) -> Selection:
    """Rank all results and pick the best feasible one, or report that none qualifies."""
    results = list(results)
    if not results:
        raise DesignError("no results to select from")
    scored = []
    for r in results:
        ok = meets_primary(r, objective)
        scores = secondary_scores(r, objective)
        scored.append(((not ok, tuple(-s for s in scores), r.configuration.key(base)), ok, r))
    scored.sort(key=lambda t: t[0])
    ranked = tuple(
        DesignResult(r.configuration, r.seasons, ok, rank) for rank, (_, ok, r) in enumerate(scored, start=1)
    )
    best = ranked[0] if ranked[0].feasible else None
    return Selection(best, ranked)


# --- sweep matrix export


def _fmt(value) -> str:
    return "" if value is None else repr(float(value))


def sweep_header(season_names: Sequence[str]) -> list[str]:
    cols = [
        "config_index",
        "insulation_u_w_m2k",
        "wall_conductivity_w_mk",
        "wall_thickness_m",
        "fan_rated_power_w",
        "fan_rated_airflow_m3s",
        "fan_max_airflow_m3s",
        "utilization",
    ]
    for s in season_names:
        cols += [f"{s}_{m}" for m in _CSV_METRICS]
        cols.append(f"{s}_degenerate")
    return cols + ["feasible", "rank", "selected"]


def write_sweep(selection: Selection, path: str | Path, base: EnclosureSpec) -> None:
    """One row per configuration in enumeration order; the chosen one has ``selected`` = 1."""
    rows = sorted(selection.ranked, key=lambda r: r.configuration.index)
    seasons = sorted(rows[0].seasons)
    chosen = selection.selected.configuration.index if selection.selected else None
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(sweep_header(seasons))
        for r in rows:
            c = r.configuration
            ins = c.insulation
            fan = c.fan
            row = [
                str(c.index),
                _fmt(ins.enclosure(base).u),
                _fmt(ins.wall_conductivity),
                _fmt(ins.wall_thickness),
                _fmt(fan.rated_power if fan else None),
                _fmt(fan.rated_airflow if fan else None),
                _fmt(fan.max_airflow if fan else None),
                _fmt(c.utilization),
            ]
            for s in seasons:
                m = r.seasons[s]
                row += [_fmt(getattr(m, name)) for name in _CSV_METRICS]
                row.append(str(int(m.degenerate)))
            row += [str(int(bool(r.feasible))), str(r.rank), str(int(c.index == chosen))]
            writer.writerow(row)


def read_sweep(path: str | Path) -> list[dict[str, object]]:
    """Parse a sweep matrix back into dicts with typed values (None for empty cells)."""
    out = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            parsed: dict[str, object] = {}
            for k, v in row.items():
                if k in ("config_index", "rank") or k.endswith("_degenerate") or k in ("feasible", "selected"):
                    parsed[k] = int(v)
                else:
                    parsed[k] = None if v == "" else float(v)
            out.append(parsed)
    return out
