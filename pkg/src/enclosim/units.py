"""Unit conversion at the I/O boundary.

Everything inside the simulator is SI (K, J, W, kg, m, s). Config files and
traces carry degrees Celsius, watt-hours and the odd imperial length; they are
converted here and nowhere else.
"""

from __future__ import annotations

ZERO_CELSIUS_K = 273.15
JOULES_PER_WH = 3600.0
METERS_PER_FOOT = 0.3048
METERS_PER_INCH = 0.0254

_TEMPERATURE = {"C", "F", "K"}

# multiplicative units expressed in their SI base
_SCALE = {
    "J": ("energy", 1.0),
    "Wh": ("energy", JOULES_PER_WH),
    "kWh": ("energy", 1000.0 * JOULES_PER_WH),
    "m": ("length", 1.0),
    "ft": ("length", METERS_PER_FOOT),
    "in": ("length", METERS_PER_INCH),
}


class UnitError(ValueError):
    pass


def _to_kelvin(value: float, unit: str) -> float:
    if unit == "K":
        return value
    if unit == "C":
        return value + ZERO_CELSIUS_K
    return (value - 32.0) * 5.0 / 9.0 + ZERO_CELSIUS_K


def _from_kelvin(value: float, unit: str) -> float:
    if unit == "K":
        return value
    if unit == "C":
        return value - ZERO_CELSIUS_K
    return (value - ZERO_CELSIUS_K) * 9.0 / 5.0 + 32.0


def convert_units(value: float, from_unit: str, to_unit: str) -> float:
    """Convert ``value`` between two units of the same dimension.

    Supported: temperatures ``C``/``F``/``K``, energies ``J``/``Wh``/``kWh``
    and lengths ``m``/``ft``/``in``.

    >>> convert_units(25.0, "C", "K")
    298.15
    >>> convert_units(8.0, "ft", "m")
    2.4384
    """
    if from_unit in _TEMPERATURE and to_unit in _TEMPERATURE:
        return _from_kelvin(_to_kelvin(value, from_unit), to_unit)
    try:
        dim_a, scale_a = _SCALE[from_unit]
        dim_b, scale_b = _SCALE[to_unit]
    except KeyError:
        raise UnitError(f"unsupported unit pair {from_unit!r} -> {to_unit!r}") from None
    if dim_a != dim_b:
        raise UnitError(f"cannot convert {dim_a} ({from_unit}) to {dim_b} ({to_unit})")
    if scale_a == scale_b:
        return value
    return value * scale_a / scale_b


def c_to_k(celsius: float) -> float:
    return celsius + ZERO_CELSIUS_K


def k_to_c(kelvin: float) -> float:
    return kelvin - ZERO_CELSIUS_K
