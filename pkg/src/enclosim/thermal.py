"""Lumped-parameter enclosure thermal model.

The enclosure is a single well-mixed node: processors, batteries and air all
sit at ``T_enc``. Heat leaves through the walls (series convection /
conduction / convection), enters as processor power, and is removed by a fan
moving ambient air through the box.

All functions are pure and work in SI units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

ATMOSPHERE_PA = 101325.0
R_SPECIFIC_DRY_AIR = 287.058  # J kg^-1 K^-1
C_AIR_CONSTANT_VOLUME = 717.0  # J kg^-1 K^-1, sealed enclosure air
SEAL_TEMPERATURE_K = 298.15  # enclosure closed at 25 C, 1 atm

# fan-path air properties (20 C, constant pressure)
FAN_AIR_DENSITY = 1.20  # kg m^-3
FAN_AIR_SPECIFIC_HEAT = 1000.0  # J kg^-1 K^-1

# explicit Euler stays monotone for dT/dt = -T/tau when dt <= STABILITY_FRACTION * tau
STABILITY_FRACTION = 0.1


class ThermalError(ValueError):
    pass


class UnstableStepError(ThermalError):
    """Step size too large for the explicit integrator to stay non-oscillating."""


class CannotCoolError(ThermalError):
    """Moving air cannot remove heat when the enclosure is not warmer than ambient."""


class InsufficientCoolingError(ThermalError):
    """Requested airflow exceeds what the fan can deliver."""


def _require_positive(**values: float) -> None:
    for name, value in values.items():
        if not value > 0:
            raise ThermalError(f"{name} must be strictly positive, got {value!r}")


@dataclass(frozen=True)
class EnclosureSpec:
    """Cubic enclosure.

    Either give the wall build-up (``wall_thickness``, ``wall_conductivity``,
    ``internal_convection``, ``external_convection``) or a combined
    ``u_value`` directly, in which case the series formula is bypassed.
    """

    side_length: float
    wall_thickness: float | None = None
    wall_conductivity: float | None = None
    internal_convection: float | None = None
    external_convection: float | None = None
    u_value: float | None = None

    def __post_init__(self):
        _require_positive(side_length=self.side_length)
        layers = (
            self.wall_thickness,
            self.wall_conductivity,
            self.internal_convection,
            self.external_convection,
        )
        if self.u_value is not None:
            _require_positive(u_value=self.u_value)
            if any(v is not None for v in layers):
                raise ThermalError("give either u_value or the wall layers, not both")
        else:
            if any(v is None for v in layers):
                raise ThermalError("wall layers incomplete and no u_value given")
            _require_positive(
                wall_thickness=self.wall_thickness,
                wall_conductivity=self.wall_conductivity,
                internal_convection=self.internal_convection,
                external_convection=self.external_convection,
            )

    @property
    def area(self) -> float:
        return surface_area(self)

    @property
    def u(self) -> float:
        return combined_heat_transfer_coefficient(self)

    @property
    def ua(self) -> float:
        return self.u * self.area

    @property
    def volume(self) -> float:
        return self.side_length**3


@dataclass(frozen=True)
class ThermalMass:
    mass: float  # kg
    specific_heat: float  # J kg^-1 K^-1

    def __post_init__(self):
        _require_positive(mass=self.mass, specific_heat=self.specific_heat)

    @property
    def capacity(self) -> float:
        """Heat capacity in J/K."""
        return self.mass * self.specific_heat


@dataclass(frozen=True)
class AirState:
    pressure: float  # Pa
    temperature: float  # K
    r_specific: float = R_SPECIFIC_DRY_AIR

    def __post_init__(self):
        _require_positive(
            pressure=self.pressure, temperature=self.temperature, r_specific=self.r_specific
        )

    @property
    def density(self) -> float:
        return air_density(self)


@dataclass(frozen=True)
class EnclosureThermalState:
    t_enc: float  # K
    mass: float  # kg, m_enc
    specific_heat: float  # J kg^-1 K^-1, C_enc

    @property
    def heat_capacity(self) -> float:
        """m_enc * C_enc in J/K."""
        return self.mass * self.specific_heat

    @classmethod
    def from_components(
        cls, t_enc: float, air: ThermalMass, battery: ThermalMass, processor: ThermalMass
    ) -> "EnclosureThermalState":
        m_enc, c_enc = enclosure_aggregate(air, battery, processor)
        return cls(t_enc, m_enc, c_enc)


@dataclass(frozen=True)
class FanSpec:
    """A variable-speed fan characterised at one operating point.

    ``rated_power`` is drawn at ``rated_airflow``; power follows the cubic
    affinity law up to ``max_airflow``.
    """

    rated_power: float  # W
    rated_airflow: float  # m^3/s
    max_airflow: float  # m^3/s

    def __post_init__(self):
        _require_positive(rated_power=self.rated_power, rated_airflow=self.rated_airflow)
        if self.max_airflow < self.rated_airflow:
            raise ThermalError("max_airflow must be >= rated_airflow")

    @property
    def max_power(self) -> float:
        return fan_power(self, self.max_airflow)

    @classmethod
    def from_cooling_capacity(
        cls,
        capacity_w: float,
        design_delta_t: float,
        rated_fraction: float = 0.5,
        efficacy_w_per_m3s: float = 300.0,
    ) -> "FanSpec":
        """Size a fan so that it removes ``capacity_w`` at ``design_delta_t``.

        Cooling capacity is read as the dissipation reached at ``max_airflow``
        when the exhaust is ``design_delta_t`` above ambient. The rated point
        sits at ``rated_fraction`` of max airflow with the given efficacy
        (electrical watts per m^3/s of flow).
        """
        _require_positive(capacity_w=capacity_w, design_delta_t=design_delta_t)
        max_af = required_airflow(capacity_w, delta_t_air=design_delta_t)
        rated_af = rated_fraction * max_af
        return cls(efficacy_w_per_m3s * rated_af, rated_af, max_af)


def surface_area(spec: EnclosureSpec) -> float:
    return 6.0 * spec.side_length**2


def combined_heat_transfer_coefficient(spec: EnclosureSpec) -> float:
    """Overall U of the wall: three resistances in series."""
    if spec.u_value is not None:
        return spec.u_value
    resistance = (
        1.0 / spec.internal_convection
        + spec.wall_thickness / spec.wall_conductivity
        + 1.0 / spec.external_convection
    )
    return 1.0 / resistance


def air_density(air: AirState) -> float:
    return air.pressure / (air.r_specific * air.temperature)


def sealed_air_mass(side_length: float) -> float:
    """Mass of air in a cube sealed at 25 C and 1 atm.

    Density is frozen at sealing time; the ratio p/T of a closed volume does
    not change afterwards.
    """
    rho = air_density(AirState(ATMOSPHERE_PA, SEAL_TEMPERATURE_K))
    return rho * side_length**3


def enclosure_aggregate(
    air: ThermalMass, battery: ThermalMass, processor: ThermalMass
) -> tuple[float, float]:
    """Total mass and mass-weighted specific heat of the enclosure contents."""
    parts = (air, battery, processor)
    m_enc = sum(p.mass for p in parts)
    c_enc = sum(p.mass * p.specific_heat for p in parts) / m_enc
    return m_enc, c_enc


def heat_transfer_rate(u: float, area: float, t_amb: float, t_enc: float) -> float:
    """Wall heat flow in W; positive means heat flows into the enclosure."""
    return u * area * (t_amb - t_enc)


def max_stable_step(heat_capacity: float, ua: float) -> float:
    return STABILITY_FRACTION * heat_capacity / ua


def check_step(dt: float, heat_capacity: float, ua: float) -> None:
    limit = max_stable_step(heat_capacity, ua)
    if dt > limit * (1.0 + 1e-12):
        raise UnstableStepError(
            f"step {dt:g} s exceeds stability limit {limit:g} s "
            f"(time constant {heat_capacity / ua:g} s)"
        )


def step_enclosure_temperature(
    state: EnclosureThermalState,
    q_trans: float,
    p_proc: float,
    q_diss: float,
    dt: float,
    ua: float | None = None,
) -> float:
    """Advance ``T_enc`` by one explicit step.

    ``q_trans`` is held constant over the step. When ``ua`` is supplied the
    step-size guard is enforced.
    """
    if dt <= 0:
        raise ThermalError("dt must be positive")
    if p_proc < 0 or q_diss < 0:
        raise ThermalError("processor power and fan dissipation must be non-negative")
    if ua is not None:
        check_step(dt, state.heat_capacity, ua)
    return state.t_enc + (q_trans + p_proc - q_diss) * dt / state.heat_capacity


def equilibrium_temperature(
    u: float, area: float, t_amb: float, p_proc: float, q_diss: float = 0.0
) -> float:
    ua = u * area
    if not ua > 0:
        raise ThermalError("U*A must be positive")
    return t_amb + (p_proc - q_diss) / ua


def required_airflow(
    p_diss: float,
    rho_air: float = FAN_AIR_DENSITY,
    c_air: float = FAN_AIR_SPECIFIC_HEAT,
    delta_t_air: float = 1.0,
) -> float:
    """Volumetric flow (m^3/s) that carries ``p_diss`` watts at a given air temperature rise."""
    if delta_t_air <= 0:
        raise CannotCoolError(f"air temperature rise must be positive, got {delta_t_air:g} K")
    _require_positive(rho_air=rho_air, c_air=c_air)
    return p_diss / (rho_air * c_air * delta_t_air)


def fan_power(fan: FanSpec, airflow: float) -> float:
    """Electrical power at ``airflow`` from the cubic fan law."""
    if airflow < 0:
        raise ThermalError("airflow must be non-negative")
    if airflow > fan.max_airflow * (1.0 + 1e-12):
        raise InsufficientCoolingError(
            f"airflow {airflow:g} m^3/s exceeds fan maximum {fan.max_airflow:g} m^3/s"
        )
    ratio = airflow / fan.rated_airflow
    return fan.rated_power * ratio * ratio * ratio


def calibrate_side_length(
    u: float, t_amb: float, p_proc: float, t_target: float
) -> float:
    """Cube side that makes the no-fan equilibrium with ``p_proc`` land on ``t_target``."""
    offset = t_target - t_amb
    if offset <= 0 or p_proc <= 0:
        raise ThermalError("calibration needs positive power and a target above ambient")
    return math.sqrt(p_proc / (offset * u * 6.0))
