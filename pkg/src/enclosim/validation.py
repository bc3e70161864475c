"""Warm-up curve families for checking the thermal model against intuition.

Each preset varies one input (ambient temperature, wall conductivity or
processor power) around a baseline of a box starting at 0 C in 10 C air with
an idle processor and no fan.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .engine import Scenario
from .thermal import (
    EnclosureSpec,
    EnclosureThermalState,
    check_step,
    enclosure_aggregate,
    equilibrium_temperature,
    heat_transfer_rate,
    step_enclosure_temperature,
)
from .units import c_to_k, k_to_c

BASELINE_T_AMB_C = 10.0
BASELINE_K = 0.04
BASELINE_POWER_W = 0.0
INITIAL_T_ENC_C = 0.0

PRESETS = {
    "fig6a": ("t_amb_c", (5.0, 10.0, 15.0, 20.0)),
    "fig6b": ("wall_conductivity_w_mk", (0.02, 0.04, 0.08)),
    "fig6c": ("power_w", (0.0, 2.5, 5.0, 10.0)),
}


class ValidationError(ValueError):
    pass


@dataclass(frozen=True)
class Curve:
    label: str
    value: float
    times: np.ndarray  # s since start
    t_enc: np.ndarray  # K

    @property
    def equilibrium(self) -> float:
        return float(self.t_enc[-1])


def warmup_curve(enclosure: EnclosureSpec, mass: float, specific_heat: float, t_amb: float, power: float,
                 t0: float, duration: float, dt: float) -> tuple[np.ndarray, np.ndarray]:
    """Fixed-ambient stepped trajectory with constant processor power, no fan."""
    u, area = enclosure.u, enclosure.area
    check_step(dt, mass * specific_heat, u * area)
    n = int(round(duration / dt))
    temps = np.empty(n + 1)
    temps[0] = t = t0
    for i in range(1, n + 1):
        state = EnclosureThermalState(t, mass, specific_heat)
        t = step_enclosure_temperature(state, heat_transfer_rate(u, area, t_amb, t), power, 0.0, dt)
        temps[i] = t
    return np.arange(n + 1) * dt, temps


def preset_curves(preset: str, base: Scenario, duration: float = 12 * 3600.0, dt: float = 60.0) -> list[Curve]:
    """One curve per swept value; ``base`` supplies geometry, wall films and heat capacity."""
    if preset not in PRESETS:
        raise ValidationError(f"unknown preset {preset!r}; expected one of {sorted(PRESETS)}")
    enc = base.enclosure
    if enc.wall_conductivity is None:
        raise ValidationError("presets need an enclosure given by its wall layers")
    axis, values = PRESETS[preset]
    mass, c = enclosure_aggregate(base.air, base.battery.thermal, base.processor.thermal)
    curves = []
    for v in values:
        t_amb_c, k, p = BASELINE_T_AMB_C, BASELINE_K, BASELINE_POWER_W
        if axis == "t_amb_c":
            t_amb_c = v
        elif axis == "wall_conductivity_w_mk":
            k = v
        else:
            p = v
        e = replace(enc, wall_conductivity=k)
        times, temps = warmup_curve(e, mass, c, c_to_k(t_amb_c), p, c_to_k(INITIAL_T_ENC_C), duration, dt)
        curves.append(Curve(f"{axis}={v:g}", v, times, temps))
    return curves


def steady_state_c(base: Scenario, power: float, t_amb_c: float = BASELINE_T_AMB_C, k: float = BASELINE_K) -> float:
    e = replace(base.enclosure, wall_conductivity=k)
    return k_to_c(equilibrium_temperature(e.u, e.area, c_to_k(t_amb_c), power))


def write_curves(curves: list[Curve], path) -> None:
    """Long format: ``curve,time_s,t_enc_c``."""
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["curve", "time_s", "t_enc_c"])
        for c in curves:
            for t, temp in zip(c.times, c.t_enc):
                writer.writerow([c.label, repr(float(t)), repr(float(k_to_c(temp)))])
