import numpy as np
import pytest

from enclosim.fixtures import SEASONS, load_solar, load_temperature
from enclosim.traces import Trace, TraceCoverageError, TraceError, parse_trace, write_trace
from enclosim.units import c_to_k, k_to_c


def write(tmp_path, text, name="t.csv"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_two_rows(tmp_path):
    p = write(tmp_path, "timestamp,value\n2023-01-01T00:00:00Z,1.5\n2023-01-01T01:00:00Z,2.5\n")
    tr = parse_trace(p)
    assert len(tr.times) == 2
    assert tr.at(tr.start + 1800) == pytest.approx(2.0)


def test_temperature_kind_converts_to_kelvin(tmp_path):
    p = write(tmp_path, "timestamp,value\n2023-01-01T00:00:00Z,25\n2023-01-01T01:00:00Z,26\n")
    assert parse_trace(p, kind="temperature").values[0] == pytest.approx(298.15)


@pytest.mark.parametrize(
    "body, line",
    [
        ("2023-01-01T01:00:00Z,1\n2023-01-01T00:00:00Z,2\n", 3),
        ("2023-01-01T00:00:00Z,1\n2023-01-01T00:00:00Z,2\n", 3),
        ("2023-01-01T00:00:00Z,1\nnot-a-date,2\n", 3),
        ("2023-01-01T00:00:00Z,abc\n", 2),
        ("2023-01-01T00:00:00Z,1,2\n", 2),
    ],
)
def test_errors_name_the_line(tmp_path, body, line):
    p = write(tmp_path, "timestamp,value\n" + body)
    with pytest.raises(TraceError, match=f":{line}:"):
        parse_trace(p)


@pytest.mark.parametrize("text", ["", "timestamp,value\n", "time,v\n2023-01-01T00:00:00Z,1\n"])
def test_empty_or_bad_header(tmp_path, text):
    with pytest.raises(TraceError):
        parse_trace(write(tmp_path, text))


def test_coverage_is_a_hard_error():
    tr = Trace(np.array([0.0, 10.0]), np.array([1.0, 2.0]), "x")
    with pytest.raises(TraceCoverageError):
        tr.at(10.5)
    with pytest.raises(TraceCoverageError):
        tr.sample(np.array([-1.0, 5.0]))


def test_trace_validation():
    with pytest.raises(TraceError):
        Trace(np.array([0.0, 0.0]), np.array([1.0, 2.0]))
    with pytest.raises(TraceError):
        Trace(np.array([]), np.array([]))


def test_round_trip(tmp_path):
    tr = Trace(1.7e9 + np.array([0.0, 900.0, 1800.0]), c_to_k(np.array([-3.25, 0.1, 7.0])), "x")
    write_trace(tr, tmp_path / "a.csv", kind="temperature")
    back = parse_trace(tmp_path / "a.csv", kind="temperature")
    np.testing.assert_array_equal(back.times, tr.times)
    np.testing.assert_allclose(back.values, tr.values, rtol=0, atol=1e-12)


def test_winter_fixture_range():
    tr = load_temperature("winter")
    assert k_to_c(tr.values.min()) == pytest.approx(-15.0, abs=1e-6)
    assert k_to_c(tr.values.max()) == pytest.approx(-8.8889, abs=1e-3)


@pytest.mark.parametrize("season, lo, hi", [("spring", 7.7, 11.2), ("summer", 24.9, 36.2)])
def test_other_season_ranges(season, lo, hi):
    v = k_to_c(load_temperature(season).values)
    assert lo <= v.min() and v.max() <= hi


@pytest.mark.parametrize("season", sorted(SEASONS))
def test_solar_fixture_is_daytime_only(season):
    tr = load_solar("farmbeats", season)
    assert tr.values.min() == 0.0
    assert tr.values.max() <= 120.0
    hours = ((tr.times - tr.times[0]) / 3600.0) % 24
    assert np.all(tr.values[(hours < 5) | (hours > 21)] == 0.0)


def test_fixture_env_override(tmp_path, monkeypatch):
    (tmp_path / "traces").mkdir()
    write(tmp_path / "traces", "timestamp,value\n2023-01-01T00:00:00Z,1\n2023-01-01T01:00:00Z,1\n",
          "winter_temperature.csv")
    monkeypatch.setenv("ENCLOSIM_FIXTURES", str(tmp_path))
    assert len(load_temperature("winter").times) == 2
