"""AGEM: adaptive-compass smart greedy forwarding with walking-back void bypass.

GEAMS is the same engine with the compass sweep switched off.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .energy import EnergyModelParams, neighbor_score
from .geometry import Position, angle_offset, distance

TRAIL_CAP = 32


@dataclass(frozen=True)
class CompassConfig:
    alpha0: float = 30.0
    delta_alpha: float = 10.0
    alpha_max: float = 180.0
    n_min: int = 2

    def __post_init__(self):
        if not 0 < self.alpha0 <= self.alpha_max <= 180:
            raise ValueError("need 0 < alpha0 <= alpha_max <= 180")
        if self.delta_alpha <= 0:
            raise ValueError("delta_alpha must be positive")
        if self.n_min < 2:
            raise ValueError("n_min must be at least 2")

    def schedule(self) -> List[float]:
        alphas = []
        a = self.alpha0
        while a < self.alpha_max:
            alphas.append(a)
            a += self.delta_alpha
        alphas.append(self.alpha_max)
        return alphas


def adaptive_candidates(u: Position, d: Position, closer: Sequence[tuple],
                        cfg: CompassConfig = CompassConfig(), geams: bool = False):
    """Widen the cone around u->d until it holds ``cfg.n_min`` candidates.

    ``closer`` holds ``(id, position, ...)`` tuples already restricted to
    unblocked neighbors strictly closer to ``d``. Returns
    ``(candidates, alpha)``, or ``None`` when a walk back is needed.
    """
    if not closer:
        return None
    if geams:
        return list(closer), 180.0
    offsets = [angle_offset(u, c[1], d) for c in closer]
    inside: List[tuple] = []
    for alpha in cfg.schedule():
        inside = [c for c, off in zip(closer, offsets) if off <= alpha]
        if len(inside) >= cfg.n_min:
            return inside, alpha
    if inside:
        return inside, cfg.alpha_max
    return None


@dataclass(frozen=True)
class BestNeighborSet:
    entries: Tuple[Tuple[int, float], ...]
    j: int

    @property
    def m(self) -> int:
        return len(self.entries)

    def node(self, index: int) -> int:
        return self.entries[index - 1][0]

    @property
    def scores(self) -> List[float]:
        return [s for _, s in self.entries]


def build_best_neighbor_set(scored: Sequence[Tuple[int, float]]) -> BestNeighborSet:
    if not scored:
        raise ValueError("best neighbor set needs at least one candidate")
    entries = tuple(sorted(scored, key=lambda e: (-e[1], e[0])))
    mean = sum(s for _, s in entries) / len(entries)
    j = min(range(len(entries)), key=lambda i: (abs(entries[i][1] - mean), i)) + 1
    return BestNeighborSet(entries, j)


class StreamState:
    """Per-source ``(H, j)`` pairs kept by one forwarder."""

    def __init__(self):
        self.pairs: Dict[int, Tuple[int, int]] = {}

    def get(self, source: int) -> Optional[Tuple[int, int]]:
        return self.pairs.get(source)

    def smart_forward(self, bns: BestNeighborSet, source: int, hop_count: int) -> int:
        """Pick the 1-based index into ``bns`` for a packet and update the pair.

        The stored ``j`` is clamped into ``[1, m]`` when the set shrank since
        it was written; the pair is rewritten with the current set's ``j``.
        """
        m = bns.m
        stored = self.pairs.get(source)
        if stored is None:
            self.pairs[source] = (hop_count, bns.j)
            return 1
        H, j = stored
        j = min(max(j, 1), m)
        index = j + (H - hop_count)
        if index <= 0:
            H = H - index + 1
            index = 1
        if index > m:
            H = H - index + m
            index = m
        self.pairs[source] = (H, bns.j)
        return index


@dataclass
class VoidState:
    blocked: Set[Tuple[int, int]] = field(default_factory=set)
    self_blocked: Set[int] = field(default_factory=set)

    def is_blocked(self, neighbor: int, sink: int) -> bool:
        return (neighbor, sink) in self.blocked


@dataclass(frozen=True)
class VoidAnnouncement:
    announcer: int
    sink: int


def handle_void_announcement(state: VoidState, ann: VoidAnnouncement) -> VoidState:
    state.blocked.add((ann.announcer, ann.sink))
    return state


DELEGATE_RULES = ("nearest_sink", "nearest_self")


def pick_delegate(self_pos: Position, sink: int, entries: Sequence, void: VoidState,
                  trail: Sequence[int] = (), rule: str = "nearest_self",
                  sink_pos: Optional[Position] = None) -> Optional[int]:
    """Unblocked neighbor that takes over a packet stuck at a void.

    ``nearest_self`` picks the neighbor closest to the forwarder,
    ``nearest_sink`` the one closest to the sink. Neighbors off the packet's
    trail win over trail nodes; falling back to the trail lets a dead end
    hand the packet to the hop it came from. Every walk back blocks one more
    node, so the recursion ends.
    """
    if rule not in DELEGATE_RULES:
        raise ValueError(f"unknown delegate rule {rule!r}")
    options = [e for e in entries if not void.is_blocked(e.id, sink)]
    if not options:
        return None
    ref = self_pos if rule == "nearest_self" else sink_pos
    seen = set(trail)
    return min(options, key=lambda e: (e.id in seen, distance(ref, e.pos), e.id)).id


def enter_walking_back(self_id: int, self_pos: Position, sink: int, entries: Sequence,
                       void: VoidState, trail: Sequence[int] = (),
                       rule: str = "nearest_self", sink_pos: Optional[Position] = None):
    """Mark the forwarder blocked for ``sink`` and choose who takes the packet back.

    Returns the announcement to broadcast and the delegate id (``None`` when
    the node is isolated).
    """
    void.self_blocked.add(sink)
    delegate = pick_delegate(self_pos, sink, entries, void, trail, rule, sink_pos)
    return VoidAnnouncement(self_id, sink), delegate


@dataclass(frozen=True)
class Forward:
    next_hop: int
    mode: str
    alpha: Optional[float] = None
    index: Optional[int] = None
    scores: Tuple[float, ...] = ()


@dataclass(frozen=True)
class Drop:
    reason: str


class AgemRouter:
    """Per-hop AGEM (or GEAMS) decisions for the simulator."""

    def __init__(self, energy: EnergyModelParams, compass: CompassConfig = CompassConfig(),
                 geams: bool = False, delegate_rule: str = "nearest_self"):
        self.energy = energy
        self.compass = compass
        self.geams = geams
        self.delegate_rule = delegate_rule
        self.name = "geams" if geams else "agem"

    def prepare(self, sim):
        pass

    def decide(self, sim, node, pkt):
        sink = pkt.sink
        dpos = sim.pos(sink)
        entries = node.live_neighbors(sim.now)
        if any(e.id == sink for e in entries):
            return Forward(sink, "smart", index=1)
        here = distance(node.pos, dpos)
        closer = [(e.id, e.pos, e) for e in entries
                  if distance(e.pos, dpos) < here and not node.void.is_blocked(e.id, sink)]
        res = adaptive_candidates(node.pos, dpos, closer, self.compass, self.geams)
        if res is None:
            newly = sink not in node.void.self_blocked
            ann, delegate = enter_walking_back(node.id, node.pos, sink, entries, node.void,
                                               pkt.trail, self.delegate_rule, dpos)
            if newly:
                sim.announce_void(node, ann)
            if delegate is None:
                return Drop("isolated_void")
            return Forward(delegate, "walkback")
        cands, alpha = res
        bns = build_best_neighbor_set(
            [(c[0], neighbor_score(self.energy, c[2].energy, c[2].distance)) for c in cands])
        index = node.streams.smart_forward(bns, pkt.source, pkt.hop_count)
        return Forward(bns.node(index), "smart", alpha, index, tuple(bns.scores))
