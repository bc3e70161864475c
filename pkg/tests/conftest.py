import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from enclosim.battery import BatterySpec
from enclosim.compute import ProcessorSpec
from enclosim.engine import Scenario
from enclosim.policies import ConstantUtilization
from enclosim.thermal import EnclosureSpec, FanSpec, ThermalMass
from enclosim.traces import Trace
from enclosim.units import c_to_k

settings.register_profile(
    "repo", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("repo")

T0 = 1_672_531_200.0  # 2023-01-01T00:00:00Z


def flat_trace(value, hours=48.0, start=T0):
    return Trace.constant(value, start, start + hours * 3600.0)


def small_scenario(
    t_amb_c=25.0,
    solar_w=0.0,
    u=0.5,
    hours=24.0,
    battery_wh=120.0,
    initial_soc=1.0,
    fan=None,
    u_value=1.0,
    side=0.3,
    dt=60.0,
    temperature_trace=None,
    solar_trace=None,
    **kw,
):
    """Nano-class board with a small pack in a foam box."""
    battery = BatterySpec.from_wh(
        battery_wh, reference_discharge_power=5.5, max_charge_power=20.0, thermal=ThermalMass(0.8, 900.0)
    )
    return Scenario(
        EnclosureSpec(side, u_value=u_value),
        battery,
        ProcessorSpec(1.0, 10.0, ThermalMass(0.3, 500.0)),
        temperature_trace or flat_trace(c_to_k(t_amb_c), hours + 2),
        solar_trace or flat_trace(solar_w, hours + 2),
        ConstantUtilization(u),
        fan=fan,
        dt=dt,
        duration=hours * 3600.0,
        initial_stored_energy=initial_soc * battery.nominal_capacity,
        **kw,
    )


@pytest.fixture
def scenario():
    return small_scenario()


@pytest.fixture
def small_fan():
    return FanSpec(rated_power=2.0, rated_airflow=0.01, max_airflow=0.02)


def diurnal_trace(t_min_c, t_max_c, hours=48.0, step=900.0, start=T0):
    h = np.arange(0.0, hours + step / 3600.0, step / 3600.0)
    temps = t_min_c + (t_max_c - t_min_c) * 0.5 * (1 - np.cos(2 * np.pi * (h - 3.0) / 24.0))
    return Trace(start + h * 3600.0, c_to_k(temps))
