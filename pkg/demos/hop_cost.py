"""Why fewer hops beat spreading the load in energy terms.

With the first-order radio model every hop pays the electronics cost twice
(send and receive) no matter how short it is; the amplifier term only grows
with distance squared. Within an 80 m radio range the electronics dominate,
so a route's energy is roughly proportional to its hop count. A protocol
that takes more, shorter hops to spread load drains more energy in total
even while it drains it more evenly.

    python3 demos/hop_cost.py
"""
import math

from wmsnroute.energy import EnergyModelParams, rx_energy, tx_energy
from wmsnroute.metrics import compute_metrics
from wmsnroute.scenario import EnergyConfig, Scenario, TopologySpec, simulate

p = EnergyModelParams()
k = p.packet_bits
print("per-hop cost of one 1000-bit packet")
for d in (20, 40, 60, 80):
    tx, rx = tx_energy(p, k, d), rx_energy(p, k)
    amp = k * p.eps_amp * d * d
    print(f"  d={d:>2} m  total={1000 * (tx + rx):.2f} mJ  amplifier share={amp / (tx + rx):.0%}")
print(f"hop length where amplifier equals electronics: {math.sqrt(2 * p.e_elec / p.eps_amp):.0f} m")
print()

print("plain 30-node field, 10 J per node")
print(f"{'seed':>4} {'proto':<5} {'hops/pkt':>8} {'spent J':>8} {'GED %':>7} {'std %':>6}")
for seed in range(1, 6):
    for protocol in ("agem", "gpsr"):
        sc = Scenario(protocol=protocol, topology=TopologySpec(n=30), seed=seed,
                      energy=EnergyConfig(initial_energy=10.0))
        res, _ = simulate(sc)
        rec = compute_metrics(res, seed=seed)
        hops = len(res.hops) / max(1, res.generated)
        print(f"{seed:>4} {protocol:<5} {hops:8.2f} {res.energy_spent:8.2f} "
              f"{rec.ged_mean_pct:7.2f} {rec.ged_std_pct:6.2f}")
