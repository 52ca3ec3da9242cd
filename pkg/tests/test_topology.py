import itertools
import logging

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wmsnroute.geometry import distance
from wmsnroute.topology import (DEFAULT_HOLES, SINK_POS, SOURCE_POS, Deployment, Field, Hole,
                                NodeSpec, TopologyError, adjacency, connected_deployment,
                                gen_grid, gen_holes, gen_plain, is_connected,
                                min_pairwise_distance, neighbors)

from oracles import brute_neighbors, deployment_graph


def test_plain_deterministic():
    a = gen_plain(30, Field(), seed=1)
    b = gen_plain(30, Field(), seed=1)
    assert a.to_json() == b.to_json()
    assert a.fingerprint() == b.fingerprint()
    assert gen_plain(30, Field(), seed=2).fingerprint() != a.fingerprint()


def test_plain_layout():
    dep = gen_plain(30, Field(), seed=1)
    assert len(dep) == 32
    assert dep.pos(dep.source) == SOURCE_POS == (10.0, 90.0)
    assert dep.pos(dep.sink) == SINK_POS == (490.0, 90.0)
    assert len(dep.relays) == 30
    for n in dep.nodes:
        assert 0 <= n.pos[0] <= 500 and 0 <= n.pos[1] <= 200
    # every pair, exhaustively
    for a, b in itertools.combinations(dep.nodes, 2):
        assert distance(a.pos, b.pos) > 1.0
    assert min_pairwise_distance(dep) > 1.0


def test_crowded_field_fails_explicitly():
    # 5000 discs of radius 5 m cannot pack into 500x200 m (area bound ~1.3e5 > 1e5)
    with pytest.raises(TopologyError, match="could not place"):
        gen_plain(5000, Field(), seed=1, min_sep=10.0)


def test_one_hole_is_empty():
    hole = Hole((250.0, 100.0), 40.0)
    assert DEFAULT_HOLES[1] == (hole,)
    for seed in range(5):
        dep = gen_holes(30, Field(), [hole], seed=seed)
        assert not any(hole.contains(n.pos) for n in dep.nodes)


def test_zero_radius_hole_matches_plain():
    a = gen_holes(30, Field(), [Hole((250.0, 100.0), 0.0)], seed=4)
    b = gen_plain(30, Field(), seed=4)
    assert [n.pos for n in a.nodes] == [n.pos for n in b.nodes]


def test_full_height_holes_split_graph():
    holes = [Hole((250.0, 40.0), 90.0), Hole((250.0, 160.0), 90.0)]
    dep = gen_holes(40, Field(), holes, seed=3)
    assert not is_connected(dep)
    assert not nx.has_path(deployment_graph(dep), dep.source, dep.sink)


def test_grid():
    dep = gen_grid()
    assert len(dep) == 26
    assert is_connected(dep)
    assert nx.has_path(deployment_graph(dep), dep.source, dep.sink)
    assert dep.to_json() == gen_grid().to_json()
    adj = adjacency(dep)
    interior = [u for u in dep.relays if 0 < dep.pos(u)[1] < 180 and
                55 < dep.pos(u)[0] < 55 + 5 * 78]
    assert interior
    assert all(len(adj[u]) >= 4 for u in interior)


def test_neighbors_examples():
    nodes = (NodeSpec(0, (0.0, 0.0), "source"), NodeSpec(1, (80.0, 0.0), "relay"),
             NodeSpec(2, (300.0, 0.0), "relay"), NodeSpec(3, (380.1, 0.0), "sink"))
    dep = Deployment(nodes)
    assert neighbors(dep, 0) == [1] and neighbors(dep, 1) == [0]   # 80 m is inclusive
    assert neighbors(dep, 3) == []                                  # 80.1 m is not
    assert neighbors(dep, 2) == []
    with pytest.raises(KeyError):
        neighbors(dep, 9)


@settings(max_examples=25)
@given(st.integers(0, 10_000), st.integers(3, 60))
def test_neighbors_symmetric_and_match_brute_force(seed, n):
    dep = gen_plain(n, Field(), seed=seed)
    adj = adjacency(dep)
    for u in range(len(dep)):
        assert adj[u] == neighbors(dep, u) == brute_neighbors(dep, u)
        for v in adj[u]:
            assert u in adj[v]


@settings(max_examples=25)
@given(st.integers(0, 10_000))
def test_connectivity_matches_flood_fill_oracle(seed):
    dep = gen_plain(30, Field(), seed=seed)
    assert is_connected(dep) == nx.has_path(deployment_graph(dep), dep.source, dep.sink)


def test_connected_deployment_resamples_and_logs(caplog):
    seed = next(s for s in range(100) if not is_connected(gen_plain(30, Field(), seed=s)))
    with caplog.at_level(logging.INFO, logger="wmsnroute.topology"):
        dep, attempts = connected_deployment(gen_plain, seed, 30, Field())
    assert attempts >= 1
    assert is_connected(dep)
    assert "resampled" in caplog.text
    again, _ = connected_deployment(gen_plain, seed, 30, Field())
    assert again.fingerprint() == dep.fingerprint()


def test_connected_deployment_gives_up():
    holes = [Hole((250.0, 40.0), 90.0), Hole((250.0, 160.0), 90.0)]
    with pytest.raises(TopologyError):
        connected_deployment(gen_holes, 1, 20, Field(), holes, max_resamples=5)


def test_json_roundtrip():
    dep = gen_holes(30, Field(), DEFAULT_HOLES[2], seed=3)
    back = Deployment.from_json(dep.to_json())
    assert back == dep
    assert back.fingerprint() == dep.fingerprint()


def test_deployment_validation():
    with pytest.raises(ValueError):
        Deployment((NodeSpec(0, (0.0, 0.0), "source"), NodeSpec(1, (1.0, 0.0), "relay")))
    with pytest.raises(ValueError):
        Deployment((NodeSpec(1, (0.0, 0.0), "source"), NodeSpec(0, (1.0, 0.0), "sink")))
    with pytest.raises(ValueError):
        Field(0, 10)
    with pytest.raises(ValueError):
        gen_plain(0)
