"""Two ways out of a dead end.

Five nodes: the source at the origin, a tempting relay at (70, 0) that is
closer to the sink but has nowhere to go, and a detour over the top.
AGEM walks the first packet back, marks the relay as blocked for that sink
and never uses it again. GPSR switches to perimeter mode and walks the face
of the planar graph instead.

    python3 demos/void_recovery.py
"""
from wmsnroute.scenario import EnergyConfig, Scenario, TopologySpec, simulate
from wmsnroute.topology import Deployment, NodeSpec

dep = Deployment((NodeSpec(0, (0.0, 0.0), "source"),
                  NodeSpec(1, (70.0, 0.0), "relay"),
                  NodeSpec(2, (0.0, 70.0), "relay"),
                  NodeSpec(3, (60.0, 120.0), "relay"),
                  NodeSpec(4, (130.0, 110.0), "sink")), name="pocket")

for protocol in ("agem", "gpsr"):
    sc = Scenario(protocol=protocol, topology=TopologySpec(kind="grid"),
                  energy=EnergyConfig(initial_energy=10.0), seed=1)
    res, _ = simulate(sc, dep)
    print(f"== {protocol}: delivered {len(res.delivered)}/{res.generated}")
    for uid in (0, 1, 25):
        hops = [f"{h.sender}->{h.receiver} ({h.mode})" for h in res.hops if h.uid == uid]
        print(f"  packet {uid:>3}: " + ", ".join(hops))
    if res.walkbacks:
        for t, node, sink in res.walkbacks:
            print(f"  t={t:.4f}s node {node} blocked itself for sink {sink}")
    print(f"  data hops into node 1: {sum(h.receiver == 1 for h in res.hops)}")
