"""Synthetic seasonal profiles and the bundled fixture directory.

The day profiles are smooth cosines between a pre-dawn minimum and a
mid-afternoon maximum; solar is a half-sine between sunrise and sunset.
The season ranges are given in Fahrenheit and converted exactly.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .traces import Trace, parse_trace
from .units import c_to_k, convert_units

FIXTURE_ENV = "ENCLOSIM_FIXTURES"
SAMPLE_STEP_S = 900.0
TRACE_DAYS = 7


@dataclass(frozen=True)
class DayProfile:
    name: str
    t_min_f: float
    t_max_f: float
    sunrise_h: float
    sunset_h: float
    solar_scale: float  # fraction of nameplate reached at solar noon
    start_date: str  # ISO date of the first day
    t_min_hour: float = 5.0
    t_max_hour: float = 15.0

    @property
    def t_min_c(self) -> float:
        return convert_units(self.t_min_f, "F", "C")

    @property
    def t_max_c(self) -> float:
        return convert_units(self.t_max_f, "F", "C")

    @property
    def start(self) -> float:
        return datetime.fromisoformat(self.start_date).replace(tzinfo=timezone.utc).timestamp()


SEASONS = {
    "winter": DayProfile("winter", 5.0, 16.0, 7.25, 16.5, 0.6, "2023-01-16"),
    "spring": DayProfile("spring", 46.0, 52.0, 6.0, 19.5, 0.9, "2023-04-17"),
    "summer": DayProfile("summer", 77.0, 97.0, 5.25, 20.5, 1.0, "2023-07-17"),
}


def _hours(days: int, step: float) -> np.ndarray:
    return np.arange(int(round(days * 86400 / step)) + 1) * step / 3600.0


def diurnal_temperature_c(hours: np.ndarray, t_min: float, t_max: float, t_min_hour: float, t_max_hour: float) -> np.ndarray:
    """Cosine day: minimum at ``t_min_hour``, maximum at ``t_max_hour``, warming and cooling halves stretched to fit."""
    clock = np.mod(hours, 24.0)
    rise = t_max_hour - t_min_hour
    since_min = np.mod(clock - t_min_hour, 24.0)
    phase = np.where(since_min <= rise, since_min / rise, 1.0 + (since_min - rise) / (24.0 - rise))
    return t_min + (t_max - t_min) * 0.5 * (1.0 - np.cos(np.pi * phase))


def solar_w(hours: np.ndarray, peak_w: float, sunrise: float, sunset: float) -> np.ndarray:
    clock = np.mod(hours, 24.0)
    x = (clock - sunrise) / (sunset - sunrise)
    return np.where((x > 0) & (x < 1), peak_w * np.sin(np.pi * np.clip(x, 0.0, 1.0)), 0.0)


def season_temperature(profile: DayProfile, days: int = TRACE_DAYS, step: float = SAMPLE_STEP_S) -> Trace:
    h = _hours(days, step)
    temps = diurnal_temperature_c(h, profile.t_min_c, profile.t_max_c, profile.t_min_hour, profile.t_max_hour)
    return Trace(profile.start + h * 3600.0, c_to_k(temps), f"{profile.name}_temperature")


def season_solar(profile: DayProfile, nameplate_w: float, days: int = TRACE_DAYS, step: float = SAMPLE_STEP_S) -> Trace:
    h = _hours(days, step)
    return Trace(profile.start + h * 3600.0, solar_w(h, nameplate_w * profile.solar_scale, profile.sunrise_h, profile.sunset_h),
                 f"{profile.name}_solar")


def fixture_dir() -> Path:
    """Bundled data directory, or the directory named by ``ENCLOSIM_FIXTURES``."""
    override = os.environ.get(FIXTURE_ENV)
    if override:
        return Path(override)
    return Path(__file__).resolve().parent / "data"


def fixture_path(*parts: str) -> Path:
    path = fixture_dir().joinpath(*parts)
    if not path.exists():
        raise FileNotFoundError(f"fixture {'/'.join(parts)} not found under {fixture_dir()}")
    return path


def load_temperature(season: str) -> Trace:
    return parse_trace(fixture_path("traces", f"{season}_temperature.csv"), kind="temperature")


def load_solar(system: str, season: str) -> Trace:
    return parse_trace(fixture_path("traces", f"{system}_{season}_solar.csv"), kind="solar")
