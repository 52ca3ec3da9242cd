import json

import pytest

from wmsnroute.scenario import (PROTOCOLS, ConfigError, ExperimentPlan, RoutingConfig, Scenario,
                                TopologySpec)
from wmsnroute.topology import TopologyError, gen_plain


def test_defaults():
    sc = Scenario()
    assert sc.protocol == "agem" and sc.energy.initial_energy == 1.0
    assert sc.traffic.images == 30 and sc.link.data_rate == 250_000
    assert sc.routing.walkback_delegate == "nearest_self"


def test_roundtrip():
    sc = Scenario(protocol="gpsr", topology=TopologySpec(kind="holes", n=50,
                                                          holes=((100, 100, 30),)), seed=4)
    d = json.loads(json.dumps(sc.to_dict()))
    assert Scenario.from_dict(d) == sc


@pytest.mark.parametrize("bad", [
    {"protocol": "aodv"},
    {"colour": "red"},
    {"energy": {"initial_energy": -1}},
    {"energy": {"joules": 1}},
    {"topology": {"kind": "torus"}},
    {"topology": {"holes": [[1, 2]]}},
    {"routing": {"walkback_delegate": "random"}},
    {"compass": {"n_min": 1}},
    {"traffic": "lots"},
])
def test_strict_validation(bad):
    with pytest.raises(ConfigError):
        Scenario.from_dict(bad)


def test_plan_cardinality():
    plan = ExperimentPlan.from_dict({"topologies": [{"n": 30}], "seeds": list(range(1, 11))})
    assert len(plan.scenarios) == len(PROTOCOLS) * 10 == 40
    assert {s.protocol for s in plan.scenarios} == set(PROTOCOLS)
    assert plan.config["seeds"] == list(range(1, 11))


def test_plan_seed_override_and_errors(tmp_path):
    plan = ExperimentPlan.from_dict({"protocols": ["agem"], "seeds": [1]}, seeds=[3, 4])
    assert [s.seed for s in plan.scenarios] == [3, 4]
    for bad in ({"protocols": []}, {"protocol": "agem"}, {"seeds": ["x"]}, []):
        with pytest.raises(ConfigError):
            ExperimentPlan.from_dict(bad)
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(ConfigError):
        ExperimentPlan.load(p)


def test_labels():
    assert TopologySpec(n=50).label() == "plain50"
    assert TopologySpec(kind="holes", n=30).label() == "holes1_30"
    assert TopologySpec(kind="grid").label() == "grid26"


def test_file_topology(tmp_path):
    dep = gen_plain(30, seed=1)
    p = tmp_path / "mine.json"
    p.write_text(dep.to_json())
    got, attempts = TopologySpec(kind="file", path=str(p), ensure_connected=False).build(9)
    assert got == dep and attempts == 0
    with pytest.raises(TopologyError):
        TopologySpec(kind="file", path=str(tmp_path / "missing.json")).build(1)
    with pytest.raises(ValueError):
        TopologySpec(kind="file")


def test_routing_validation():
    with pytest.raises(ValueError):
        RoutingConfig(planarization="delaunay")
    with pytest.raises(ValueError):
        RoutingConfig(max_hops=0)
