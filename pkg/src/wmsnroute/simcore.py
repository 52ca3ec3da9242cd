"""Deterministic discrete-event engine.

One radio per node, FIFO drop-tail queues, unit-disc links with a fixed
bit rate, periodic beacons that refresh neighbor tables, and a single
image-burst traffic source. No collisions or MAC contention are modeled.
"""
from __future__ import annotations

import heapq
import itertools
import math
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from .agem import TRAIL_CAP, StreamState, VoidState, handle_void_announcement
from .energy import EnergyModelParams, EnergyStore, debit, rx_energy, tx_energy
from .geometry import Position, distance
from .topology import Deployment, adjacency


@dataclass(frozen=True)
class LinkModel:
    data_rate: float = 250_000.0       # bit/s
    per_hop_processing: float = 1e-3   # s
    queue_capacity: int = 20           # packets waiting behind the one on air

    def __post_init__(self):
        if self.data_rate <= 0 or self.per_hop_processing <= 0 or self.queue_capacity <= 0:
            raise ValueError("link model parameters must be positive")


@dataclass(frozen=True)
class TrafficSpec:
    images: int = 30
    image_bits: int = 10_000
    image_period: float = 1.0
    packet_bits: int = 1000

    def __post_init__(self):
        if self.images < 0 or self.image_bits <= 0 or self.packet_bits <= 0 or self.image_period <= 0:
            raise ValueError("traffic parameters must be positive")

    def fragments(self) -> List[int]:
        full, rest = divmod(self.image_bits, self.packet_bits)
        return [self.packet_bits] * full + ([rest] if rest else [])


@dataclass(frozen=True)
class BeaconConfig:
    enabled: bool = True
    interval: float = 1.0
    bits: int = 200
    charge_energy: bool = True
    stale_intervals: int = 3


@dataclass
class Packet:
    uid: int
    stream_id: int
    source: int
    sink: int
    seq: int
    size: int
    created_at: float
    kind: str = "data"
    hop_count: int = 0
    delivered_at: Optional[float] = None
    trail: List[int] = field(default_factory=list)
    perimeter: object = None
    route: Optional[List[int]] = None


@dataclass
class NeighborEntry:
    id: int
    pos: Position
    energy: float
    distance: float
    last_heard: float


class Node:
    def __init__(self, nid: int, pos: Position, role: str, store: EnergyStore, powered: bool):
        self.id = nid
        self.pos = pos
        self.role = role
        self.store = store
        self.powered = powered
        self.table: Dict[int, NeighborEntry] = {}
        self.queue: deque = deque()
        self.busy = False
        self.streams = StreamState()
        self.void = VoidState()
        self.data_tx = 0
        self.died_at: Optional[float] = None
        self.stale_after = math.inf

    @property
    def alive(self) -> bool:
        return self.powered or not self.store.dead

    @property
    def residual(self) -> float:
        return self.store.residual

    def live_neighbors(self, now: float) -> List[NeighborEntry]:
        stale = [k for k, e in self.table.items() if now - e.last_heard >= self.stale_after - 1e-9]
        for k in stale:
            del self.table[k]
        return [self.table[k] for k in sorted(self.table)]


class EventQueue:
    """Min-heap keyed on (time, priority, insertion order)."""

    def __init__(self):
        self._heap = []
        self._seq = itertools.count()
        self.current_time = 0.0

    def push(self, time: float, priority: int, kind: str, *payload):
        if time < self.current_time:
            raise ValueError(f"event at {time} scheduled in the past ({self.current_time})")
        heapq.heappush(self._heap, (time, priority, next(self._seq), kind, payload))

    def pop(self):
        time, _, _, kind, payload = heapq.heappop(self._heap)
        self.current_time = time
        return time, kind, payload

    def __len__(self):
        return len(self._heap)


@dataclass
class HopRecord:
    time: float
    uid: int
    sender: int
    receiver: int
    mode: str
    bits: int
    distance: float
    tx_nominal: float
    tx_applied: float
    rx_nominal: float = 0.0
    rx_applied: float = 0.0
    received: bool = False


@dataclass
class RunResult:
    protocol: str
    dep: Deployment
    initial: List[float]
    residual: List[float]
    generated: int
    delivered: List[Packet]
    drops: Counter
    drop_log: List[tuple]
    hops: List[HopRecord]
    decisions: List[tuple]
    events: List[tuple]
    walkbacks: List[tuple]
    deaths: Dict[int, float]
    data_tx: List[int]
    energy_spent: float
    clamp_events: int
    duplicates: int
    end_time: float
    extra: dict = field(default_factory=dict)


class Simulator:
    PRIO_BEACON = 0
    PRIO_OTHER = 1

    def __init__(self, dep: Deployment, router, *, energy: EnergyModelParams = EnergyModelParams(),
                 initial_energy: float = 1.0, energy_overrides: Optional[Dict[int, float]] = None,
                 sink_powered: bool = True, link: LinkModel = LinkModel(),
                 traffic: TrafficSpec = TrafficSpec(), beacons: BeaconConfig = BeaconConfig(),
                 max_hops: int = 255, trace: bool = False):
        self.dep = dep
        self.router = router
        self.energy = energy
        self.link = link
        self.traffic = traffic
        self.beacons = beacons
        self.max_hops = max_hops
        self.trace = trace
        self.adj = adjacency(dep)
        overrides = energy_overrides or {}
        self.nodes: List[Node] = []
        for spec in dep.nodes:
            e0 = float(overrides.get(spec.id, initial_energy))
            powered = sink_powered and spec.role == "sink"
            node = Node(spec.id, spec.pos, spec.role, EnergyStore.full(e0), powered)
            if beacons.enabled:
                node.stale_after = beacons.stale_intervals * beacons.interval
            self.nodes.append(node)
        self.initial = [n.store.initial for n in self.nodes]
        self.q = EventQueue()
        self.generated = 0
        self.outstanding = 0
        self.images_left = traffic.images
        self.delivered: List[Packet] = []
        self.delivered_keys = set()
        self.duplicates = 0
        self.drops: Counter = Counter()
        self.drop_log: List[tuple] = []
        self.hops: List[HopRecord] = []
        self.decisions: List[tuple] = []
        self.events: List[tuple] = []
        self.walkbacks: List[tuple] = []
        self.deaths: Dict[int, float] = {}
        self.spent = 0.0
        self.clamps = 0
        self._uid = itertools.count()
        self._snapshot_tables()

    # -- helpers -----------------------------------------------------------
    @property
    def now(self) -> float:
        return self.q.current_time

    def pos(self, u: int) -> Position:
        return self.nodes[u].pos

    def _log(self, kind, node, pkt=None, detail=""):
        if self.trace:
            self.events.append((self.now, kind, node,
                                "" if pkt is None else pkt.stream_id,
                                "" if pkt is None else pkt.seq, detail))

    def _snapshot_tables(self):
        for u in self.nodes:
            for v in self.adj[u.id]:
                w = self.nodes[v]
                u.table[v] = NeighborEntry(v, w.pos, w.residual, distance(u.pos, w.pos), 0.0)

    def _charge(self, node: Node, amount: float) -> float:
        """Debit ``amount`` from a battery node; returns the joules actually removed."""
        if node.powered or amount == 0.0:
            return 0.0
        before = node.residual
        if amount > before:
            self.clamps += 1
        node.store = debit(node.store, amount)
        # not before - residual: that subtraction loses bits on a large battery
        applied = min(amount, before)
        self.spent += applied
        if node.store.dead and node.died_at is None:
            self._kill(node)
        return applied

    def _kill(self, node: Node):
        node.died_at = self.now
        self.deaths[node.id] = self.now
        self._log("death", node.id)
        while node.queue:
            self._drop(node.queue.popleft(), node, "dead_node")

    def _drop(self, pkt: Packet, node: Node, reason: str):
        self.drops[reason] += 1
        self.drop_log.append((self.now, pkt.uid, node.id, reason))
        self.outstanding -= 1
        self._log("drop", node.id, pkt, reason)

    # -- public operations -------------------------------------------------
    def enqueue_or_drop(self, node: Node, pkt: Packet) -> bool:
        if len(node.queue) >= self.link.queue_capacity:
            self._drop(pkt, node, "queue_overflow")
            return False
        node.queue.append(pkt)
        self._serve(node)
        return True

    def announce_void(self, node: Node, ann):
        """Idealized control broadcast: every live radio neighbor learns it at once."""
        self.walkbacks.append((self.now, node.id, ann.sink))
        self._log("void_announce", node.id, detail=f"sink={ann.sink}")
        self._charge(node, tx_energy(self.energy, self.beacons.bits, self.dep.radio_range))
        for v in self.adj[node.id]:
            w = self.nodes[v]
            if w.alive:
                self._charge(w, rx_energy(self.energy, self.beacons.bits))
                handle_void_announcement(w.void, ann)

    def beacon_tick(self, node: Node):
        cost = tx_energy(self.energy, self.beacons.bits, self.dep.radio_range)
        if self.beacons.charge_energy:
            self._charge(node, cost)
        for v in self.adj[node.id]:
            w = self.nodes[v]
            if not w.alive:
                continue
            if self.beacons.charge_energy:
                self._charge(w, rx_energy(self.energy, self.beacons.bits))
            if w.alive:
                w.table[node.id] = NeighborEntry(node.id, node.pos, node.residual,
                                                 distance(w.pos, node.pos), self.now)

    # -- event handlers ----------------------------------------------------
    def _on_beacon(self):
        for node in self.nodes:
            if node.alive:
                self.beacon_tick(node)
        if self.images_left > 0 or self.outstanding > 0:
            self.q.push(self.now + self.beacons.interval, self.PRIO_BEACON, "beacon")

    def _on_generate(self, image: int):
        self.images_left -= 1
        src = self.nodes[self.dep.source]
        for size in self.traffic.fragments():
            seq = self.generated
            pkt = Packet(next(self._uid), 0, src.id, self.dep.sink, seq, size, self.now)
            self.generated += 1
            self.outstanding += 1
            self._log("generate", src.id, pkt, f"image={image}")
            if not src.alive:
                self._drop(pkt, src, "dead_source")
            else:
                self.enqueue_or_drop(src, pkt)

    def _serve(self, node: Node):
        while not node.busy and node.queue and node.alive:
            pkt = node.queue.popleft()
            if pkt.hop_count >= self.max_hops:
                self._drop(pkt, node, "ttl")
                continue
            dec = self.router.decide(self, node, pkt)
            if not node.alive:
                self._drop(pkt, node, "dead_node")
                continue
            if not hasattr(dec, "next_hop"):
                self._drop(pkt, node, dec.reason)
                continue
            self.decisions.append((self.now, node.id, pkt.uid, dec.mode, dec.alpha,
                                   dec.index, dec.scores, dec.next_hop))
            self._transmit(node, pkt, dec.next_hop, dec.mode)

    def _transmit(self, node: Node, pkt: Packet, nxt: int, mode: str):
        d = distance(node.pos, self.pos(nxt))
        nominal = tx_energy(self.energy, pkt.size, d)
        rec = HopRecord(self.now, pkt.uid, node.id, nxt, mode, pkt.size, d, nominal, 0.0)
        self.hops.append(rec)
        pkt.hop_count += 1
        pkt.trail.append(node.id)
        del pkt.trail[:-TRAIL_CAP]
        node.data_tx += 1
        node.busy = True
        airtime = pkt.size / self.link.data_rate
        self._log("tx", node.id, pkt, f"to={nxt} mode={mode}")
        self.q.push(self.now + airtime + self.link.per_hop_processing, self.PRIO_OTHER,
                    "arrive", pkt, rec)
        self.q.push(self.now + airtime, self.PRIO_OTHER, "tx_done", node.id)
        rec.tx_applied = self._charge(node, nominal)

    def _on_arrive(self, pkt: Packet, rec: HopRecord):
        r = self.nodes[rec.receiver]
        if not r.alive:
            self._drop(pkt, r, "dead_neighbor")
            return
        rec.received = True
        rec.rx_nominal = 0.0 if r.powered else rx_energy(self.energy, pkt.size)
        rec.rx_applied = self._charge(r, rec.rx_nominal)
        if r.id == pkt.sink:
            self._deliver(pkt)
            return
        if not r.alive:
            self._drop(pkt, r, "dead_node")
            return
        self.enqueue_or_drop(r, pkt)

    def _deliver(self, pkt: Packet):
        key = (pkt.stream_id, pkt.seq)
        self.outstanding -= 1
        if key in self.delivered_keys:
            self.duplicates += 1
            return
        self.delivered_keys.add(key)
        pkt.delivered_at = self.now
        self.delivered.append(pkt)
        self._log("deliver", pkt.sink, pkt, f"hops={pkt.hop_count}")

    def _on_tx_done(self, nid: int):
        node = self.nodes[nid]
        node.busy = False
        self._serve(node)

    # -- main loop ---------------------------------------------------------
    def run(self) -> RunResult:
        self.router.prepare(self)
        if self.beacons.enabled:
            self.q.push(0.0, self.PRIO_BEACON, "beacon")
        for i in range(self.traffic.images):
            self.q.push(i * self.traffic.image_period, self.PRIO_OTHER, "generate", i)
        while len(self.q):
            _, kind, payload = self.q.pop()
            if kind == "beacon":
                self._on_beacon()
            elif kind == "generate":
                self._on_generate(*payload)
            elif kind == "arrive":
                self._on_arrive(*payload)
            elif kind == "tx_done":
                self._on_tx_done(*payload)
        return RunResult(
            protocol=self.router.name, dep=self.dep, initial=list(self.initial),
            residual=[n.residual for n in self.nodes], generated=self.generated,
            delivered=self.delivered, drops=self.drops, drop_log=self.drop_log,
            hops=self.hops, decisions=self.decisions, events=self.events,
            walkbacks=self.walkbacks, deaths=self.deaths,
            data_tx=[n.data_tx for n in self.nodes], energy_spent=self.spent,
            clamp_events=self.clamps, duplicates=self.duplicates, end_time=self.now,
            extra={"self_blocked": {n.id: sorted(n.void.self_blocked)
                                    for n in self.nodes if n.void.self_blocked},
                   **(self.router.run_info() if hasattr(self.router, "run_info") else {})})
