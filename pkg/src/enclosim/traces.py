"""Time series input: ambient temperature and solar power traces.

On disk a trace is a CSV with header ``timestamp,value``; timestamps are
ISO-8601 UTC, temperatures in degrees Celsius, solar power in watts.
In memory times are POSIX seconds and temperatures are kelvin.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .units import c_to_k, k_to_c


class TraceError(ValueError):
    pass


class TraceCoverageError(TraceError):
    pass


def parse_timestamp(text: str) -> float:
    text = text.strip()
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    stamp = datetime.fromisoformat(text)
    if stamp.tzinfo is None:
        stamp = stamp.replace(tzinfo=timezone.utc)
    return stamp.timestamp()


def format_timestamp(seconds: float) -> str:
    stamp = datetime.fromtimestamp(seconds, tz=timezone.utc)
    return stamp.strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass(frozen=True, eq=False)
class Trace:
    """Samples of a scalar signal, linearly interpolated between samples."""

    times: np.ndarray
    values: np.ndarray
    name: str = ""

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if times.ndim != 1 or times.shape != values.shape:
            raise TraceError("times and values must be 1-D arrays of equal length")
        if len(times) == 0:
            raise TraceError("trace is empty")
        if np.any(np.diff(times) <= 0):
            raise TraceError("trace timestamps must be strictly increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    @property
    def start(self) -> float:
        return float(self.times[0])

    @property
    def end(self) -> float:
        return float(self.times[-1])

    def covers(self, t0: float, t1: float) -> bool:
        return self.start <= t0 and t1 <= self.end

    def at(self, t: float) -> float:
        return float(self.sample(np.array([t]))[0])

    def sample(self, times: np.ndarray) -> np.ndarray:
        times = np.asarray(times, dtype=float)
        outside = (times < self.start) | (times > self.end)
        if np.any(outside):
            bad = float(times[np.argmax(outside)])
            raise TraceCoverageError(
                f"trace {self.name or '<unnamed>'} has no data at {format_timestamp(bad)}"
            )
        return np.interp(times, self.times, self.values)

    def __eq__(self, other):
        if not isinstance(other, Trace):
            return NotImplemented
        return np.array_equal(self.times, other.times) and np.array_equal(self.values, other.values)

    @classmethod
    def constant(cls, value: float, start: float, end: float, name: str = "") -> "Trace":
        return cls(np.array([start, end]), np.array([value, value]), name)


def parse_trace(path: str | Path, kind: str = "raw") -> Trace:
    """Read a trace CSV.

    ``kind`` is ``"temperature"`` (values in C, returned in K), ``"solar"``
    (W) or ``"raw"`` (no conversion). Rows must already be sorted; an
    out-of-order or duplicate timestamp is reported with its line number.
    """
    if kind not in ("temperature", "solar", "raw"):
        raise TraceError(f"unknown trace kind {kind!r}")
    path = Path(path)
    times: list[float] = []
    values: list[float] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise TraceError(f"{path}: empty file")
        if [h.strip() for h in header] != ["timestamp", "value"]:
            raise TraceError(f"{path}:1: expected header 'timestamp,value', got {header!r}")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 2:
                raise TraceError(f"{path}:{lineno}: expected 2 fields, got {len(row)}")
            try:
                t = parse_timestamp(row[0])
                v = float(row[1])
            except ValueError as exc:
                raise TraceError(f"{path}:{lineno}: malformed row {row!r} ({exc})") from None
            if times and t == times[-1]:
                raise TraceError(f"{path}:{lineno}: duplicate timestamp {row[0].strip()}")
            if times and t < times[-1]:
                raise TraceError(f"{path}:{lineno}: timestamp {row[0].strip()} out of order")
            times.append(t)
            values.append(c_to_k(v) if kind == "temperature" else v)
    if not times:
        raise TraceError(f"{path}: no samples")
    return Trace(np.array(times), np.array(values), name=path.stem)


def write_trace(trace: Trace, path: str | Path, kind: str = "raw") -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["timestamp", "value"])
        for t, v in zip(trace.times, trace.values):
            value = k_to_c(v) if kind == "temperature" else v
            writer.writerow([format_timestamp(t), repr(float(value))])
