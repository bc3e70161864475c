import copy
import json

import pytest

from enclosim.config import (
    ConfigError,
    audit_unit_suffixes,
    horizon_from_dict,
    load_horizon,
    load_json,
    load_objective,
    load_scenario,
    load_space,
    resolve_config_path,
    scenario_from_dict,
)
from enclosim.fixtures import fixture_dir
from enclosim.policies import ConstantUtilization, DutyCycleEnergyProportional, MultiExitRounds
from enclosim.units import c_to_k

FIXTURES = ["prototype", "edge_datacenter"]


@pytest.fixture
def proto_doc():
    path = resolve_config_path("prototype")
    return load_json(path), path.parent


@pytest.mark.parametrize("name", FIXTURES)
def test_bundled_scenarios_load(name):
    sc = load_scenario(name)
    assert sc.dt > 0 and sc.duration > 0
    assert not audit_unit_suffixes(load_json(resolve_config_path(name)))


def test_horizon_scenario_takes_traces_from_horizon():
    with pytest.raises(ConfigError, match="temperature_trace_csv"):
        load_scenario("daynight")
    h = load_horizon("daynight_horizon")
    sc = load_scenario("daynight", traces=h.traces())
    assert sc.temperature_trace.sample([h.start])[0] == pytest.approx(h.temperatures[0])


def test_prototype_values(proto_doc):
    sc = load_scenario("prototype")
    assert isinstance(sc.policy, ConstantUtilization)
    assert sc.policy.utilization == 0.5
    assert sc.battery.nominal_capacity == pytest.approx(20.0 * 3600)
    assert sc.enclosure.wall_conductivity == 0.04
    assert sc.fan is None


def test_unknown_key_rejected(proto_doc):
    doc, base = proto_doc
    doc = copy.deepcopy(doc)
    doc["enclosure"]["colour"] = "grey"
    with pytest.raises(ConfigError, match="enclosure"):
        scenario_from_dict(doc, base)
    doc = copy.deepcopy(proto_doc[0])
    doc["speed"] = 3
    with pytest.raises(ConfigError):
        scenario_from_dict(doc, base)


def test_missing_required_key(proto_doc):
    doc, base = copy.deepcopy(proto_doc[0]), proto_doc[1]
    del doc["battery"]["capacity_wh"]
    with pytest.raises(ConfigError):
        scenario_from_dict(doc, base)


def test_negative_values_rejected(proto_doc):
    doc, base = copy.deepcopy(proto_doc[0]), proto_doc[1]
    doc["step_s"] = -1
    with pytest.raises(ConfigError):
        scenario_from_dict(doc, base)
    doc = copy.deepcopy(proto_doc[0])
    doc["policy"]["utilization"] = 1.5
    with pytest.raises(ConfigError):
        scenario_from_dict(doc, base)


def test_missing_traces(proto_doc):
    doc, base = copy.deepcopy(proto_doc[0]), proto_doc[1]
    del doc["solar_trace_csv"]
    with pytest.raises(ConfigError, match="solar_trace_csv"):
        scenario_from_dict(doc, base)


def test_celsius_and_watt_hours_are_converted(proto_doc):
    doc, base = copy.deepcopy(proto_doc[0]), proto_doc[1]
    doc["initial_t_enc_c"] = 12.5
    doc["initial_stored_energy_wh"] = 10.0
    doc["compute_cutoff_c"] = 50.0
    doc["resume_c"] = 45.0
    sc = scenario_from_dict(doc, base)
    assert sc.initial_t_enc == pytest.approx(c_to_k(12.5))
    assert sc.initial_stored_energy == pytest.approx(36000.0)
    assert sc.compute_cutoff == pytest.approx(c_to_k(50.0))


def test_policy_kinds(proto_doc):
    doc, base = copy.deepcopy(proto_doc[0]), proto_doc[1]
    doc["policy"] = {"kind": "duty_cycle", "max_utilization": 0.8}
    assert isinstance(scenario_from_dict(doc, base).policy, DutyCycleEnergyProportional)
    doc["policy"] = {"kind": "multi_exit", "stage_costs_j": [10, 20], "round_period_s": 600,
                     "thermal_aware": True, "budget_window_s": 1200}
    pol = scenario_from_dict(doc, base).policy
    assert isinstance(pol, MultiExitRounds) and pol.budget_window == 1200
    doc["policy"] = {"kind": "spin"}
    with pytest.raises(ConfigError):
        scenario_from_dict(doc, base)


def test_fan_forms(proto_doc):
    doc, base = copy.deepcopy(proto_doc[0]), proto_doc[1]
    doc["fan"] = {"rated_power_w": 2.0, "rated_airflow_m3s": 0.01, "max_airflow_m3s": 0.02}
    fan = scenario_from_dict(doc, base).fan
    assert (fan.rated_power, fan.rated_airflow, fan.max_airflow) == (2.0, 0.01, 0.02)
    doc["fan"] = {"cooling_capacity_w": 100.0, "design_delta_t_k": 5.0}
    assert scenario_from_dict(doc, base).fan.max_airflow > 0


def test_audit_unit_suffixes():
    assert audit_unit_suffixes({"a_m": 1, "utilization": 0.5, "name": "x"}) == []
    assert audit_unit_suffixes({"length": 2.0}) == ["length"]
    assert audit_unit_suffixes({"outer": {"items": [{"speed": 1}]}}) == ["outer.items[0].speed"]
    assert audit_unit_suffixes({"flag": True}) == []


def test_malformed_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{ not json")
    with pytest.raises(ConfigError, match="malformed"):
        load_json(p)


def test_missing_config():
    with pytest.raises(ConfigError, match="not found"):
        resolve_config_path("no_such_scenario")


def test_space_and_objectives():
    problem = load_space("edge_space")
    assert len(problem.space) == 30
    assert {s.name for s in problem.seasons} >= {"winter", "summer"}
    obj = load_objective("edge_objective")
    assert obj.primary_metric == "availability" and obj.target == 100.0
    assert obj.min_utilization == 0.5
    assert load_objective("edge_objective_unsatisfiable").target > 0


def test_bad_objective_metric(tmp_path):
    p = tmp_path / "o.json"
    p.write_text(json.dumps({"primary_metric": "cost", "primary_target": 1}))
    with pytest.raises(ConfigError):
        load_objective(p)


def test_horizons():
    h = load_horizon("daynight_horizon")
    assert len(h) == 24
    assert h.temperatures[0] == pytest.approx(c_to_k(18.702796))
    flat = load_horizon("flat_horizon")
    assert len(set(flat.temperatures)) == 1


def test_horizon_length_mismatch():
    doc = {"start_iso8601": "2023-01-01T00:00:00Z", "temperatures_c": [1, 2], "solar_w": [0],
           "demand_u_hours": [1, 1]}
    with pytest.raises(ConfigError):
        horizon_from_dict(doc)


def test_fixture_dir_override(tmp_path, monkeypatch):
    monkeypatch.setenv("ENCLOSIM_FIXTURES", str(tmp_path))
    assert fixture_dir() == tmp_path
