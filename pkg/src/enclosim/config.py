"""JSON configuration documents and their conversion to model objects.

Every physical quantity in a config carries its unit in the key name
(``_m``, ``_c``, ``_wh``, ``_w`` ...); values are converted to SI here and
nowhere else. Unknown keys are rejected by the schemas, and
:func:`audit_unit_suffixes` checks that every numeric key is either
unit-suffixed or explicitly dimensionless.

Relative file paths inside a config resolve against the config's own
directory.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import jsonschema

from .battery import BatterySpec, EmpiricalCurve
from .design import DesignSpace, Insulation, Objective, Season
from .engine import Scenario
from .fixtures import fixture_dir
from .policies import (
    ConstantUtilization,
    DutyCycleEnergyProportional,
    MultiExitRounds,
    MultiExitSpec,
    PlannedSchedule,
)
from .compute import ProcessorSpec
from .scheduler import ForecastHorizon, read_plan
from .thermal import EnclosureSpec, FanSpec, ThermalMass
from .traces import parse_timestamp, parse_trace
from .units import c_to_k, convert_units


class ConfigError(ValueError):
    pass


UNIT_SUFFIXES = (
    "_m", "_c", "_k", "_wh", "_w", "_j", "_s", "_kg",
    "_w_m2k", "_w_mk", "_j_kgk", "_m3s", "_w_per_m3s",
    "_fraction", "_percent", "_u_hours",
)
# numeric keys that are dimensionless by nature
DIMENSIONLESS_KEYS = {
    "utilization", "max_utilization", "unit_count", "availability_threshold",
    "min_utilization", "primary_target", "charge_efficiency", "utilizations",
    "stage_ratio", "stage_count",
}

_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}
_NONNEG = {"type": "number", "minimum": 0}
_STR = {"type": "string"}


def _obj(props: dict, required=()) -> dict:
    return {"type": "object", "properties": props, "required": list(required), "additionalProperties": False}


ENCLOSURE_SCHEMA = {
    "oneOf": [
        _obj({"side_length_m": _POS, "u_value_w_m2k": _POS}, ["side_length_m", "u_value_w_m2k"]),
        _obj(
            {
                "side_length_m": _POS,
                "wall_thickness_m": _POS,
                "wall_conductivity_w_mk": _POS,
                "internal_convection_w_m2k": _POS,
                "external_convection_w_m2k": _POS,
            },
            ["side_length_m", "wall_thickness_m", "wall_conductivity_w_mk",
             "internal_convection_w_m2k", "external_convection_w_m2k"],
        ),
    ]
}

FAN_SCHEMA = {
    "oneOf": [
        {"type": "null"},
        _obj({"rated_power_w": _POS, "rated_airflow_m3s": _POS, "max_airflow_m3s": _POS},
             ["rated_power_w", "rated_airflow_m3s", "max_airflow_m3s"]),
        _obj({"cooling_capacity_w": _POS, "design_delta_t_k": _POS, "rated_fraction": _POS,
              "efficacy_w_per_m3s": _POS}, ["cooling_capacity_w", "design_delta_t_k"]),
    ]
}

BATTERY_SCHEMA = _obj(
    {
        "capacity_wh": _POS,
        "reference_discharge_power_w": _POS,
        "max_charge_power_w": _NONNEG,
        "mass_kg": _POS,
        "specific_heat_j_kgk": _POS,
        "min_soc_fraction": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
        "discharge_floor_c": _NUM,
        "charge_floor_c": _NUM,
        "shutdown_c": _NUM,
        "charge_efficiency": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
        "temp_capacity_curve_csv": _STR,
        "discharge_factor_curve_csv": _STR,
        "charge_rate_curve_csv": _STR,
    },
    ["capacity_wh", "reference_discharge_power_w", "max_charge_power_w", "mass_kg", "specific_heat_j_kgk"],
)

PROCESSOR_SCHEMA = _obj(
    {
        "base_power_w": _NONNEG,
        "max_power_w": _NONNEG,
        "unit_count": {"type": "integer", "minimum": 1},
        "mass_kg": _POS,
        "specific_heat_j_kgk": _POS,
    },
    ["base_power_w", "max_power_w", "mass_kg", "specific_heat_j_kgk"],
)

_U = {"type": "number", "minimum": 0, "maximum": 1}

POLICY_SCHEMA = {
    "oneOf": [
        _obj({"kind": {"const": "constant"}, "utilization": _U}, ["kind", "utilization"]),
        _obj({"kind": {"const": "duty_cycle"}, "max_utilization": _U, "horizon_end_iso8601": _STR}, ["kind"]),
        _obj({"kind": {"const": "plan"}, "plan_csv": _STR}, ["kind", "plan_csv"]),
        _obj(
            {
                "kind": {"const": "multi_exit"},
                "stage_costs_j": {"type": "array", "items": _POS, "minItems": 1},
                "round_period_s": _POS,
                "thermal_aware": {"type": "boolean"},
                "budget_window_s": _POS,
            },
            ["kind", "stage_costs_j"],
        ),
    ]
}

SCENARIO_SCHEMA = _obj(
    {
        "name": _STR,
        "enclosure": ENCLOSURE_SCHEMA,
        "fan": FAN_SCHEMA,
        "battery": BATTERY_SCHEMA,
        "processor": PROCESSOR_SCHEMA,
        "temperature_trace_csv": _STR,
        "solar_trace_csv": _STR,
        "policy": POLICY_SCHEMA,
        "step_s": _POS,
        "start_iso8601": _STR,
        "duration_s": _NONNEG,
        "initial_t_enc_c": _NUM,
        "initial_stored_energy_wh": _NONNEG,
        "fan_setpoint_c": _NUM,
        "compute_cutoff_c": _NUM,
        "resume_c": _NUM,
        "availability_threshold": _U,
        "fan_approach_k": _NONNEG,
        "fan_heat_to_enclosure": {"type": "boolean"},
    },
    ["enclosure", "battery", "processor", "policy"],
)

INSULATION_SCHEMA = {
    "oneOf": [
        _obj({"u_value_w_m2k": _POS}, ["u_value_w_m2k"]),
        _obj({"wall_conductivity_w_mk": _POS, "wall_thickness_m": _POS},
             ["wall_conductivity_w_mk", "wall_thickness_m"]),
    ]
}

SPACE_SCHEMA = _obj(
    {
        "insulations": {"type": "array", "items": INSULATION_SCHEMA, "minItems": 1},
        "fans": {"type": "array", "items": FAN_SCHEMA, "minItems": 1},
        "utilizations": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                         "minItems": 1},
        "seasons": {
            "type": "object",
            "minProperties": 1,
            "additionalProperties": _obj({"temperature_trace_csv": _STR, "solar_trace_csv": _STR},
                                         ["temperature_trace_csv", "solar_trace_csv"]),
        },
    },
    ["insulations", "fans", "utilizations", "seasons"],
)

_METRIC = {"enum": ["energy_efficiency", "availability", "work_rate"]}
OBJECTIVE_SCHEMA = _obj(
    {
        "primary_metric": _METRIC,
        "primary_target": _NUM,
        "min_utilization": _U,
        "secondary_metrics": {"type": "array", "items": _METRIC},
        "binding_seasons": {"type": "array", "items": _STR},
    },
    ["primary_metric", "primary_target"],
)

HORIZON_SCHEMA = _obj(
    {
        "start_iso8601": _STR,
        "slot_duration_s": _POS,
        "temperatures_c": {"type": "array", "items": _NUM, "minItems": 1},
        "solar_w": {"type": "array", "items": _NONNEG, "minItems": 1},
        "demand_u_hours": {"type": "array", "items": _NONNEG, "minItems": 1},
    },
    ["start_iso8601", "temperatures_c", "solar_w", "demand_u_hours"],
)


def audit_unit_suffixes(doc: Any, path: str = "") -> list[str]:
    """Keys holding numbers that carry neither a unit suffix nor a dimensionless name."""
    bad = []
    if isinstance(doc, dict):
        for key, value in doc.items():
            where = f"{path}.{key}" if path else key
            numeric = isinstance(value, (int, float)) and not isinstance(value, bool)
            numeric_list = isinstance(value, list) and value and all(
                isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
            )
            if (numeric or numeric_list) and key not in DIMENSIONLESS_KEYS and not key.endswith(UNIT_SUFFIXES):
                bad.append(where)
            bad += audit_unit_suffixes(value, where)
    elif isinstance(doc, list):
        for k, item in enumerate(doc):
            bad += audit_unit_suffixes(item, f"{path}[{k}]")
    return bad


def _validate(doc: dict, schema: dict, what: str, source) -> None:
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"{source}: invalid {what} at {where}: {exc.message}") from None
    bad = audit_unit_suffixes(doc)
    if bad:
        raise ConfigError(f"{source}: numeric keys without a unit suffix: {', '.join(bad)}")


def resolve_config_path(name: str | Path, subdir: str = "scenarios") -> Path:
    """A config path as given, or a bundled fixture of that name."""
    path = Path(name)
    if path.exists():
        return path
    for candidate in (fixture_dir() / subdir / path, fixture_dir() / subdir / f"{path}.json"):
        if candidate.exists():
            return candidate
    raise ConfigError(f"config {name} not found (also looked in {fixture_dir() / subdir})")


def load_json(path: str | Path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: malformed JSON at line {exc.lineno}: {exc.msg}") from None


def _rel(base: Path, p: str) -> Path:
    q = Path(p)
    return q if q.is_absolute() else base / q


def enclosure_from(doc: dict) -> EnclosureSpec:
    if "u_value_w_m2k" in doc:
        return EnclosureSpec(doc["side_length_m"], u_value=doc["u_value_w_m2k"])
    return EnclosureSpec(
        doc["side_length_m"],
        wall_thickness=doc["wall_thickness_m"],
        wall_conductivity=doc["wall_conductivity_w_mk"],
        internal_convection=doc["internal_convection_w_m2k"],
        external_convection=doc["external_convection_w_m2k"],
    )


def fan_from(doc: dict | None) -> FanSpec | None:
    if doc is None:
        return None
    if "cooling_capacity_w" in doc:
        kwargs = {}
        if "rated_fraction" in doc:
            kwargs["rated_fraction"] = doc["rated_fraction"]
        if "efficacy_w_per_m3s" in doc:
            kwargs["efficacy_w_per_m3s"] = doc["efficacy_w_per_m3s"]
        return FanSpec.from_cooling_capacity(doc["cooling_capacity_w"], doc["design_delta_t_k"], **kwargs)
    return FanSpec(doc["rated_power_w"], doc["rated_airflow_m3s"], doc["max_airflow_m3s"])


def battery_from(doc: dict, base: Path) -> BatterySpec:
    kwargs: dict[str, Any] = {
        "reference_discharge_power": doc["reference_discharge_power_w"],
        "max_charge_power": doc["max_charge_power_w"],
        "thermal": ThermalMass(doc["mass_kg"], doc["specific_heat_j_kgk"]),
    }
    if "min_soc_fraction" in doc:
        kwargs["min_soc_fraction"] = doc["min_soc_fraction"]
    for key, field_name in (("discharge_floor_c", "discharge_floor_temp"),
                            ("charge_floor_c", "charge_floor_temp"), ("shutdown_c", "shutdown_temp")):
        if key in doc:
            kwargs[field_name] = c_to_k(doc[key])
    if "charge_efficiency" in doc:
        kwargs["charge_efficiency"] = doc["charge_efficiency"]
    for key, field_name, celsius in (
        ("temp_capacity_curve_csv", "temp_capacity_curve", True),
        ("discharge_factor_curve_csv", "discharge_factor_curve", False),
        ("charge_rate_curve_csv", "charge_rate_curve", True),
    ):
        if key in doc:
            kwargs[field_name] = EmpiricalCurve.from_csv(_rel(base, doc[key]), x_is_celsius=celsius)
    return BatterySpec.from_wh(doc["capacity_wh"], **kwargs)


def processor_from(doc: dict) -> ProcessorSpec:
    return ProcessorSpec(
        doc["base_power_w"], doc["max_power_w"],
        ThermalMass(doc["mass_kg"], doc["specific_heat_j_kgk"]),
        doc.get("unit_count", 1),
    )


def policy_from(doc: dict, base: Path):
    kind = doc["kind"]
    if kind == "constant":
        return ConstantUtilization(doc["utilization"])
    if kind == "duty_cycle":
        end = doc.get("horizon_end_iso8601")
        return DutyCycleEnergyProportional(
            None if end is None else parse_timestamp(end), doc.get("max_utilization", 1.0)
        )
    if kind == "plan":
        return PlannedSchedule(read_plan(_rel(base, doc["plan_csv"])))
    spec = MultiExitSpec(tuple(doc["stage_costs_j"]), doc.get("round_period_s", 3600.0))
    return MultiExitRounds(spec, doc.get("thermal_aware", False), budget_window=doc.get("budget_window_s"))


def scenario_from_dict(doc: dict, base: Path = Path("."), source="<scenario>", traces=None) -> Scenario:
    """Build a :class:`Scenario`; ``traces`` overrides the (temperature, solar) traces named in the document."""
    _validate(doc, SCENARIO_SCHEMA, "scenario", source)
    if traces is None:
        missing = [k for k in ("temperature_trace_csv", "solar_trace_csv") if k not in doc]
        if missing:
            raise ConfigError(f"{source}: scenario needs {', '.join(missing)}")
        traces = (
            parse_trace(_rel(base, doc["temperature_trace_csv"]), kind="temperature"),
            parse_trace(_rel(base, doc["solar_trace_csv"]), kind="solar"),
        )
    temps, solar = traces
    kwargs: dict[str, Any] = {}
    simple = {
        "step_s": ("dt", float),
        "duration_s": ("duration", float),
        "availability_threshold": ("availability_threshold", float),
        "fan_approach_k": ("fan_approach", float),
        "fan_heat_to_enclosure": ("fan_heat_to_enclosure", bool),
        "name": ("name", str),
    }
    for key, (name, cast) in simple.items():
        if key in doc:
            kwargs[name] = cast(doc[key])
    for key, name in (("initial_t_enc_c", "initial_t_enc"), ("fan_setpoint_c", "fan_setpoint"),
                      ("compute_cutoff_c", "compute_cutoff"), ("resume_c", "resume_temperature")):
        if key in doc:
            kwargs[name] = c_to_k(doc[key])
    if "start_iso8601" in doc:
        kwargs["start"] = parse_timestamp(doc["start_iso8601"])
    if "initial_stored_energy_wh" in doc:
        kwargs["initial_stored_energy"] = convert_units(doc["initial_stored_energy_wh"], "Wh", "J")
    try:
        return Scenario(
            enclosure=enclosure_from(doc["enclosure"]),
            battery=battery_from(doc["battery"], base),
            processor=processor_from(doc["processor"]),
            temperature_trace=temps,
            solar_trace=solar,
            policy=policy_from(doc["policy"], base),
            fan=fan_from(doc.get("fan")),
            **kwargs,
        )
    except (ValueError, TypeError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{source}: {exc}") from None


def load_scenario(path: str | Path, traces=None) -> Scenario:
    path = resolve_config_path(path)
    return scenario_from_dict(load_json(path), path.parent, path, traces)


@dataclass(frozen=True)
class DesignProblem:
    space: DesignSpace
    seasons: tuple[Season, ...]


def load_space(path: str | Path) -> DesignProblem:
    path = resolve_config_path(path)
    doc = load_json(path)
    _validate(doc, SPACE_SCHEMA, "design space", path)
    base = path.parent
    insulations = tuple(
        Insulation(u_value=i["u_value_w_m2k"]) if "u_value_w_m2k" in i
        else Insulation(wall_conductivity=i["wall_conductivity_w_mk"], wall_thickness=i["wall_thickness_m"])
        for i in doc["insulations"]
    )
    space = DesignSpace(insulations, tuple(fan_from(f) for f in doc["fans"]), tuple(doc["utilizations"]))
    seasons = tuple(
        Season(
            name,
            parse_trace(_rel(base, s["temperature_trace_csv"]), kind="temperature"),
            parse_trace(_rel(base, s["solar_trace_csv"]), kind="solar"),
        )
        for name, s in doc["seasons"].items()
    )
    return DesignProblem(space, seasons)


def load_objective(path: str | Path) -> Objective:
    path = resolve_config_path(path)
    doc = load_json(path)
    _validate(doc, OBJECTIVE_SCHEMA, "objective", path)
    seasons = doc.get("binding_seasons")
    return Objective(
        primary_metric=doc["primary_metric"],
        target=doc["primary_target"],
        min_utilization=doc.get("min_utilization", 0.0),
        secondary_metrics=tuple(doc.get("secondary_metrics", ())),
        binding_seasons=None if seasons is None else tuple(seasons),
    )


def horizon_from_dict(doc: dict, source="<horizon>") -> ForecastHorizon:
    _validate(doc, HORIZON_SCHEMA, "horizon", source)
    try:
        return ForecastHorizon(
            start=parse_timestamp(doc["start_iso8601"]),
            temperatures=tuple(c_to_k(t) for t in doc["temperatures_c"]),
            solar=tuple(doc["solar_w"]),
            demand=tuple(doc["demand_u_hours"]),
            slot_duration=doc.get("slot_duration_s", 3600.0),
        )
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from None


def load_horizon(path: str | Path) -> ForecastHorizon:
    path = resolve_config_path(path)
    return horizon_from_dict(load_json(path), path)
