import numpy as np
import pytest

from conftest import T0, flat_trace, small_scenario
from enclosim.design import metric_value
from enclosim.engine import (
    RECORD_FIELDS,
    MetricsReport,
    SimState,
    SimulationError,
    Simulator,
    Trajectory,
    availability,
    energy_efficiency,
    fan_controller,
    run,
    step,
    work_rate_per_hour,
)
from enclosim.policies import ConstantUtilization, Decision, Policy, Controller
from enclosim.thermal import FanSpec, UnstableStepError
from enclosim.units import c_to_k


def synthetic(n, dt=3600.0, **cols):
    base = {name: np.zeros(n) for name in RECORD_FIELDS}
    base["time"] = T0 + dt * np.arange(n)
    base["powered"] = np.ones(n, dtype=bool)
    base["available"] = np.ones(n, dtype=bool)
    base.update({k: np.asarray(v) for k, v in cols.items()})
    return Trajectory(base, dt)


def test_solar_covers_load_battery_untouched():
    sc = small_scenario(solar_w=50.0, u=0.5)
    state = Simulator(sc).initial_state()
    new, rec = step(sc, state, T0)
    assert new.stored_energy == state.stored_energy
    assert rec.energy_discharged == 0.0
    assert rec.solar_used == pytest.approx(rec.processor_power * sc.dt)


def test_compute_cutoff_latches_until_resume():
    sc = small_scenario(t_amb_c=40.0, u=1.0, hours=1.0, initial_t_enc=c_to_k(61.0), u_value=5.0, dt=10.0)
    tr = run(sc).trajectory
    assert tr["u_actual"][0] == 0.0
    halted = tr["u_actual"] == 0.0
    assert not halted.all()
    first_run = int(np.argmax(~halted))
    assert tr["t_enc"][first_run] <= c_to_k(55.0) + 1e-9
    assert np.all(tr["t_enc"][:first_run] > c_to_k(55.0))


def test_frozen_battery_no_solar():
    sc = small_scenario(t_amb_c=-30.0, u=0.5, hours=0.5, initial_t_enc=c_to_k(-25.0), u_value=5.0, dt=10.0)
    tr = run(sc).trajectory
    assert tr["u_actual"][0] == 0.0
    assert not tr["available"][0]
    assert not tr["powered"][0]


def test_zero_length_horizon():
    sc = small_scenario(hours=0.0)
    result = run(sc)
    assert len(result.trajectory) == 0
    m = result.metrics
    assert m.degenerate and m.total_work == 0.0 and m.availability == 100.0


def test_nominal_day_in_sunshine():
    # leaky enough that the box settles below the fan's 30 C target
    sc = small_scenario(t_amb_c=25.0, solar_w=100.0, u=0.5, fan=FanSpec(2.0, 0.01, 0.02), u_value=2.5)
    m = run(sc).metrics
    assert m.availability == 100.0
    assert m.total_fan_energy == 0.0
    assert m.energy_efficiency is None
    assert metric_value(m, "energy_efficiency") == 100.0


def test_battery_only_at_25c_is_lossless():
    sc = small_scenario(t_amb_c=25.0, u=0.3, hours=6.0, u_value=2.5)
    m = run(sc).metrics
    assert m.energy_efficiency == pytest.approx(100.0, abs=1e-9)


def test_energy_efficiency_worked_example():
    kwh = 3.6e6
    tr = synthetic(1, energy_drained=[10 * kwh], energy_discharged=[9 * kwh], processor_power=[8.0],
                   fan_power=[1.0])
    assert energy_efficiency(tr) == pytest.approx(80.0)


def test_availability_arithmetic():
    up = np.array([True] * 18 + [False] * 6)
    assert availability(synthetic(24, available=up)) == pytest.approx(75.0)
    assert availability(synthetic(24)) == 100.0


def test_availability_threshold_recomputed():
    tr = synthetic(4, u_requested=[0.5] * 4, u_actual=[0.5, 0.4, 0.2, 0.5])
    assert availability(tr, u_min=0.4) == 75.0
    assert availability(tr, u_min=0.0) == 100.0


def test_work_rate():
    sc = small_scenario(u=1.0, hours=1.0, solar_w=100.0)
    assert run(sc).metrics.work_rate == pytest.approx(3600.0)
    assert run(small_scenario(u=0.0, hours=1.0)).metrics.work_rate == 0.0
    a = run(small_scenario(u=0.2, hours=2.0, solar_w=100.0)).metrics.work_rate
    b = run(small_scenario(u=0.4, hours=2.0, solar_w=100.0)).metrics.work_rate
    assert b == pytest.approx(2 * a)
    assert work_rate_per_hour(synthetic(0)) == 0.0


def test_fan_off_at_setpoint(small_fan):
    sc = small_scenario(fan=small_fan)
    out = fan_controller(sc, SimState(sc.fan_setpoint, 0.0), c_to_k(10.0), 0.5)
    assert out.power == 0.0 and out.airflow == 0.0


def test_fan_removes_heat_when_hot(small_fan):
    sc = small_scenario(fan=small_fan)
    out = fan_controller(sc, SimState(c_to_k(40.0), 0.0), c_to_k(20.0), 1.0)
    assert out.q_diss > 0 and out.power > 0 and not out.cannot_cool


def test_fan_cannot_cool_when_ambient_hotter(small_fan):
    sc = small_scenario(fan=small_fan)
    out = fan_controller(sc, SimState(c_to_k(30.0), 0.0), c_to_k(35.0), 1.0)
    assert out.cannot_cool and out.q_diss == 0.0


def test_thicker_insulation_needs_no_less_fan_power():
    fan = FanSpec.from_cooling_capacity(20.0, 5.0, efficacy_w_per_m3s=2000.0)
    powers = []
    for u_value in (2.0, 1.0, 0.5, 0.25):
        sc = small_scenario(t_amb_c=30.0, solar_w=200.0, u=1.0, fan=fan, u_value=u_value, hours=12.0)
        tr = run(sc).trajectory
        powers.append(float(np.mean(tr["fan_power"][-60:])))
    assert all(b >= a - 1e-12 for a, b in zip(powers, powers[1:]))
    assert powers[-1] > powers[0]


def test_trajectory_csv_round_trip(tmp_path):
    tr = run(small_scenario(hours=2.0, t_amb_c=5.0)).trajectory
    tr.to_csv(tmp_path / "t.csv")
    assert Trajectory.from_csv(tmp_path / "t.csv") == tr


def test_metrics_json_round_trip():
    m = run(small_scenario(hours=2.0)).metrics
    assert MetricsReport.from_json(m.to_json()) == m


def test_step_matches_run():
    sc = small_scenario(hours=1.0, t_amb_c=0.0)
    result = run(sc)
    state = Simulator(sc).initial_state()
    for i in range(len(result.trajectory)):
        state, rec = step(sc, state, T0 + i * sc.dt)
        assert rec == result.trajectory.record(i)


def test_step_off_grid_rejected():
    sc = small_scenario(hours=1.0)
    with pytest.raises(SimulationError):
        step(sc, Simulator(sc).initial_state(), T0 + 1.0)


class _Wild(Policy):
    def start(self, sim):
        class C(Controller):
            def decide(self, ctx):
                return Decision(1.5)
        return C()


def test_out_of_range_policy_rejected():
    with pytest.raises(SimulationError):
        run(small_scenario(hours=1.0).with_(policy=_Wild()))


def test_closed_and_open_loop_agree():
    sc = small_scenario(hours=3.0, t_amb_c=-5.0, u=0.7)

    class Same(Policy):
        def start(self, sim):
            class C(Controller):
                def decide(self, ctx):
                    return Decision(0.7)
            return C()

    assert run(sc).trajectory == run(sc.with_(policy=Same())).trajectory


def test_scenario_validation():
    with pytest.raises(UnstableStepError):
        small_scenario(dt=3600.0, u_value=100.0)
    with pytest.raises(SimulationError):
        small_scenario(initial_soc=1.5)
    with pytest.raises(SimulationError):
        small_scenario(resume_temperature=c_to_k(70.0))


def test_trace_must_cover_horizon():
    from enclosim.traces import TraceCoverageError

    sc = small_scenario(hours=10.0, temperature_trace=flat_trace(c_to_k(20.0), hours=5.0))
    with pytest.raises(TraceCoverageError):
        run(sc)
