import math

import pytest

from enclosim.thermal import (
    ATMOSPHERE_PA,
    AirState,
    CannotCoolError,
    EnclosureSpec,
    EnclosureThermalState,
    FanSpec,
    InsufficientCoolingError,
    ThermalError,
    ThermalMass,
    UnstableStepError,
    air_density,
    calibrate_side_length,
    check_step,
    combined_heat_transfer_coefficient,
    enclosure_aggregate,
    equilibrium_temperature,
    fan_power,
    heat_transfer_rate,
    max_stable_step,
    required_airflow,
    sealed_air_mass,
    step_enclosure_temperature,
    surface_area,
)
from enclosim.units import c_to_k

HUGE = 1e9


def layered(d, k, hi=10.0, ho=25.0, side=1.0):
    return EnclosureSpec(side, wall_thickness=d, wall_conductivity=k, internal_convection=hi, external_convection=ho)


@pytest.mark.parametrize("side, area", [(1.0, 6.0), (0.5, 1.5)])
def test_surface_area_simple(side, area):
    assert surface_area(EnclosureSpec(side, u_value=1.0)) == pytest.approx(area)


def test_surface_area_eight_foot_cube():
    assert surface_area(EnclosureSpec(2.4384, u_value=1.0)) == pytest.approx(35.67, abs=0.01)


def test_u_conduction_only_when_films_vanish():
    assert combined_heat_transfer_coefficient(layered(0.04, 0.04, HUGE, HUGE)) == pytest.approx(1.0, rel=1e-6)


def test_u_eps_wall_with_films():
    assert combined_heat_transfer_coefficient(layered(0.03175, 0.04)) == pytest.approx(1.0710, abs=1e-4)


def test_halving_thickness_doubles_conduction():
    thick = combined_heat_transfer_coefficient(layered(0.03175, 0.04, HUGE, HUGE))
    thin = combined_heat_transfer_coefficient(layered(0.015875, 0.04, HUGE, HUGE))
    assert thick == pytest.approx(1.2598, abs=1e-4)
    assert thin == pytest.approx(2.5197, abs=1e-4)


def test_direct_u_bypasses_layers():
    assert EnclosureSpec(2.0, u_value=0.35).u == 0.35


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(u_value=1.0, wall_thickness=0.1),
        dict(wall_thickness=0.1, wall_conductivity=0.04),
        dict(u_value=-1.0),
    ],
)
def test_enclosure_rejects_bad_specs(kwargs):
    with pytest.raises(ThermalError):
        EnclosureSpec(1.0, **kwargs)


def test_enclosure_rejects_zero_side():
    with pytest.raises(ThermalError):
        EnclosureSpec(0.0, u_value=1.0)


def test_air_density_anchors():
    assert air_density(AirState(ATMOSPHERE_PA, 298.15)) == pytest.approx(1.1839, abs=5e-4)
    assert air_density(AirState(ATMOSPHERE_PA, 293.15)) == pytest.approx(1.204, abs=1e-3)


def test_air_density_linear_in_pressure():
    a = air_density(AirState(ATMOSPHERE_PA, 280.0))
    b = air_density(AirState(2 * ATMOSPHERE_PA, 280.0))
    assert b == 2 * a


def test_sealed_air_mass_unit_cube():
    assert sealed_air_mass(1.0) == pytest.approx(1.1839, abs=5e-4)
    assert sealed_air_mass(2.0) == pytest.approx(8 * sealed_air_mass(1.0))


def test_enclosure_aggregate_worked_example():
    m, c = enclosure_aggregate(ThermalMass(1.1839, 717.0), ThermalMass(3.0, 1000.0), ThermalMass(0.5, 700.0))
    assert m == pytest.approx(4.6839)
    assert c == pytest.approx(896.5, abs=0.1)


def test_enclosure_aggregate_single_component_dominates():
    m, c = enclosure_aggregate(ThermalMass(1e-12, 717.0), ThermalMass(5.0, 900.0), ThermalMass(1e-12, 500.0))
    assert c == pytest.approx(900.0, rel=1e-9)


def test_heat_transfer_rate():
    assert heat_transfer_rate(1.0710, 6.0, 300.0, 300.0) == 0.0
    assert heat_transfer_rate(1.0710, 6.0, 283.15, 273.15) == pytest.approx(64.26, abs=0.01)
    assert heat_transfer_rate(1.0, 6.0, 273.15, 283.15) == -heat_transfer_rate(1.0, 6.0, 283.15, 273.15)


def test_step_worked_example():
    state = EnclosureThermalState(273.15, 4198.9, 1.0)
    t = step_enclosure_temperature(state, 64.26, 0.0, 0.0, 60.0)
    assert t - 273.15 == pytest.approx(0.918, abs=1e-3)


def test_step_balanced_sources_hold_temperature():
    state = EnclosureThermalState(300.0, 10.0, 900.0)
    assert step_enclosure_temperature(state, 0.0, 25.0, 25.0, 60.0) == 300.0


def test_step_rejects_negative_inputs():
    state = EnclosureThermalState(300.0, 10.0, 900.0)
    with pytest.raises(ThermalError):
        step_enclosure_temperature(state, 0.0, -1.0, 0.0, 60.0)
    with pytest.raises(ThermalError):
        step_enclosure_temperature(state, 0.0, 0.0, 0.0, 0.0)


def test_step_guard():
    assert max_stable_step(1000.0, 10.0) == pytest.approx(10.0)
    check_step(10.0, 1000.0, 10.0)
    with pytest.raises(UnstableStepError):
        check_step(10.5, 1000.0, 10.0)
    state = EnclosureThermalState(300.0, 1000.0, 1.0)
    with pytest.raises(UnstableStepError):
        step_enclosure_temperature(state, 0.0, 0.0, 0.0, 20.0, ua=10.0)


@pytest.mark.parametrize("t0", [c_to_k(0.0), c_to_k(40.0)])
def test_relaxation_has_no_overshoot(t0):
    t_amb, ua, cap = c_to_k(20.0), 2.0, 5000.0
    dt = max_stable_step(cap, ua)
    t = t0
    side = math.copysign(1.0, t0 - t_amb)
    for _ in range(2000):
        t = step_enclosure_temperature(EnclosureThermalState(t, cap, 1.0), ua * (t_amb - t), 0.0, 0.0, dt, ua)
        assert math.copysign(1.0, t - t_amb) == side or t == t_amb
    assert t == pytest.approx(t_amb, abs=1e-6)


def test_equilibrium():
    assert equilibrium_temperature(1.0, 6.0, 290.0, 0.0) == 290.0
    off1 = equilibrium_temperature(1.0, 6.0, 290.0, 30.0) - 290.0
    off2 = equilibrium_temperature(2.0, 6.0, 290.0, 30.0) - 290.0
    assert off2 == pytest.approx(off1 / 2, rel=1e-15)
    with pytest.raises(ThermalError):
        equilibrium_temperature(0.0, 6.0, 290.0, 1.0)


def test_calibrated_side_hits_hundred_degrees():
    u = combined_heat_transfer_coefficient(layered(0.03175, 0.04))
    side = calibrate_side_length(u, c_to_k(10.0), 10.0, c_to_k(100.0))
    spec = layered(0.03175, 0.04, side=side)
    assert equilibrium_temperature(spec.u, spec.area, c_to_k(10.0), 10.0) == pytest.approx(c_to_k(100.0))


def test_required_airflow():
    assert required_airflow(120.0, 1.20, 1000.0, 10.0) == pytest.approx(0.01)
    assert required_airflow(0.0, delta_t_air=5.0) == 0.0
    assert required_airflow(240.0, delta_t_air=10.0) == 2 * required_airflow(120.0, delta_t_air=10.0)
    with pytest.raises(CannotCoolError):
        required_airflow(10.0, delta_t_air=0.0)


def test_fan_cubic_law():
    fan = FanSpec(2.0, 0.01, 0.05)
    assert fan_power(fan, 0.01) == pytest.approx(2.0)
    assert fan_power(fan, 0.02) == pytest.approx(16.0)
    assert fan_power(fan, 0.02) / fan_power(fan, 0.01) == pytest.approx(8.0, rel=1e-15)
    assert fan_power(fan, 0.0) == 0.0


def test_fan_limits():
    fan = FanSpec(2.0, 0.01, 0.02)
    with pytest.raises(InsufficientCoolingError):
        fan_power(fan, 0.03)
    with pytest.raises(ThermalError):
        FanSpec(2.0, 0.01, 0.005)


def test_fan_from_cooling_capacity():
    fan = FanSpec.from_cooling_capacity(120.0, 10.0)
    assert fan.max_airflow == pytest.approx(0.01)
    assert fan.rated_airflow == pytest.approx(0.005)
