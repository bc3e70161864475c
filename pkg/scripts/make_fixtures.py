"""Regenerate the bundled trace and scenario fixtures.

    python3 scripts/make_fixtures.py [--out DIR]

Output is deterministic; rerunning rewrites identical files.
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

import numpy as np

from enclosim.fixtures import SEASONS, season_solar, season_temperature
from enclosim.thermal import EnclosureSpec, calibrate_side_length
from enclosim.traces import Trace, parse_timestamp, write_trace
from enclosim.units import c_to_k, convert_units

PACKAGE_DATA = Path(__file__).resolve().parents[1] / "src" / "enclosim" / "data"

EDGE_NAMEPLATE_W = 5000.0
FARM_NAMEPLATE_W = 120.0

# prototype: EPS box, Nano-class board
EPS_K = 0.04
EPS_D = convert_units(1.25, "in", "m")
H_IN, H_OUT = 10.0, 25.0

DAYNIGHT_START = "2023-02-06T18:00:00Z"


def write_json(path: Path, doc: dict) -> None:
    path.write_text(json.dumps(doc, indent=2, sort_keys=False) + "\n")


def traces(out: Path) -> None:
    tdir = out / "traces"
    tdir.mkdir(parents=True, exist_ok=True)
    for name, prof in SEASONS.items():
        write_trace(season_temperature(prof), tdir / f"{name}_temperature.csv", kind="temperature")
        write_trace(season_solar(prof, EDGE_NAMEPLATE_W), tdir / f"edge_{name}_solar.csv")
        write_trace(season_solar(prof, FARM_NAMEPLATE_W), tdir / f"farmbeats_{name}_solar.csv")


def daynight_horizon(t_night: float, t_day: float, hours: int = 24) -> dict:
    """Hourly forecast starting at dusk: coldest at 03:00, warmest at 15:00."""
    from enclosim.fixtures import diurnal_temperature_c

    start = parse_timestamp(DAYNIGHT_START)
    clock = 18.0 + np.arange(hours)
    temps = diurnal_temperature_c(clock, t_night, t_day, 3.0, 15.0)
    return {
        "start_iso8601": DAYNIGHT_START,
        "slot_duration_s": 3600.0,
        "temperatures_c": [round(float(t), 6) for t in temps],
        "solar_w": [0.0] * hours,
        "demand_u_hours": [0.5] * hours,
    }


def scenarios(out: Path) -> None:
    sdir = out / "scenarios"
    sdir.mkdir(parents=True, exist_ok=True)

    edge = {
        "name": "edge_datacenter",
        "enclosure": {"side_length_m": convert_units(8.0, "ft", "m"), "u_value_w_m2k": 0.9},
        "fan": {"cooling_capacity_w": 2500.0, "design_delta_t_k": 5.0},
        "battery": {
            "capacity_wh": 20000.0,
            "reference_discharge_power_w": 1000.0,
            "max_charge_power_w": 5000.0,
            "mass_kg": 200.0,
            "specific_heat_j_kgk": 1000.0,
        },
        "processor": {
            "base_power_w": 0.0,
            "max_power_w": 250.0,
            "unit_count": 8,
            "mass_kg": 20.0,
            "specific_heat_j_kgk": 500.0,
        },
        "temperature_trace_csv": "../traces/winter_temperature.csv",
        "solar_trace_csv": "../traces/edge_winter_solar.csv",
        "policy": {"kind": "constant", "utilization": 0.5},
        "step_s": 60.0,
        "duration_s": 86400.0,
        "initial_t_enc_c": 25.0,
        "availability_threshold": 0.5,
    }
    write_json(sdir / "edge_datacenter.json", edge)

    space = {
        "insulations": [{"u_value_w_m2k": 2.0}, {"u_value_w_m2k": 0.9}, {"u_value_w_m2k": 0.35}],
        "fans": [{"cooling_capacity_w": 2500.0, "design_delta_t_k": 5.0}],
        "utilizations": [round(0.1 * k, 1) for k in range(1, 11)],
        "seasons": {
            name: {
                "temperature_trace_csv": f"../traces/{name}_temperature.csv",
                "solar_trace_csv": f"../traces/edge_{name}_solar.csv",
            }
            for name in SEASONS
        },
    }
    write_json(sdir / "edge_space.json", space)
    write_json(sdir / "edge_objective.json", {
        "primary_metric": "availability",
        "primary_target": 100.0,
        "min_utilization": 0.5,
        "secondary_metrics": ["energy_efficiency", "work_rate"],
    })
    write_json(sdir / "edge_objective_unsatisfiable.json", {
        "primary_metric": "availability",
        "primary_target": 100.0,
        "min_utilization": 1.0,
        "secondary_metrics": ["energy_efficiency"],
    })

    # side length chosen so 10 W holds the box at 100 C in 10 C ambient
    u = 1.0 / (1.0 / H_IN + EPS_D / EPS_K + 1.0 / H_OUT)
    side = calibrate_side_length(u, c_to_k(10.0), 10.0, c_to_k(100.0))
    proto = {
        "name": "prototype",
        "enclosure": {
            "side_length_m": round(side, 6),
            "wall_thickness_m": EPS_D,
            "wall_conductivity_w_mk": EPS_K,
            "internal_convection_w_m2k": H_IN,
            "external_convection_w_m2k": H_OUT,
        },
        "battery": {
            "capacity_wh": 20.0,
            "reference_discharge_power_w": 5.5,
            "max_charge_power_w": 10.0,
            "mass_kg": 0.4,
            "specific_heat_j_kgk": 900.0,
        },
        "processor": {"base_power_w": 1.0, "max_power_w": 10.0, "mass_kg": 0.25, "specific_heat_j_kgk": 500.0},
        "temperature_trace_csv": "../traces/spring_temperature.csv",
        "solar_trace_csv": "../traces/farmbeats_spring_solar.csv",
        "policy": {"kind": "constant", "utilization": 0.5},
        "step_s": 60.0,
        "duration_s": 86400.0,
    }
    write_json(sdir / "prototype.json", proto)

    # day/night scheduling system: Nano-class board in a thin plastic case
    daynight = {
        "name": "daynight",
        "enclosure": {"side_length_m": 0.15, "u_value_w_m2k": round(0.6 / (6 * 0.15**2), 6)},
        "fan": {"cooling_capacity_w": 15.0, "design_delta_t_k": 5.0, "efficacy_w_per_m3s": 2000.0},
        "battery": {
            "capacity_wh": 120.0,
            "reference_discharge_power_w": 5.5,
            "max_charge_power_w": 10.0,
            "mass_kg": 0.8,
            "specific_heat_j_kgk": 900.0,
        },
        "processor": {"base_power_w": 1.0, "max_power_w": 10.0, "mass_kg": 0.3, "specific_heat_j_kgk": 500.0},
        "policy": {"kind": "constant", "utilization": 0.5},
        "step_s": 60.0,
    }
    write_json(sdir / "daynight.json", daynight)
    write_json(sdir / "daynight_horizon.json", daynight_horizon(-18.0, 25.0))
    write_json(sdir / "flat_horizon.json", daynight_horizon(25.0, 25.0))


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=PACKAGE_DATA)
    args = parser.parse_args(argv)
    traces(args.out)
    scenarios(args.out)
    print(f"fixtures written to {args.out}")


if __name__ == "__main__":
    main()
