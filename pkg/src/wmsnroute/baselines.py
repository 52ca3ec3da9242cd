"""Comparison protocols: GPSR (greedy + perimeter) and TPGF (offline node-disjoint multipath)."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Set, Tuple

from .agem import Drop, Forward
from .geometry import Position, distance, segment_intersection
from .topology import Deployment, adjacency

PlanarAdjacency = Dict[int, List[int]]


# -- planarization ------------------------------------------------------

def _gabriel_keep(pu: Position, pv: Position, witnesses: Sequence[Position]) -> bool:
    mx, my = (pu[0] + pv[0]) / 2, (pu[1] + pv[1]) / 2
    r2 = ((pu[0] - pv[0]) ** 2 + (pu[1] - pv[1]) ** 2) / 4
    return not any((w[0] - mx) ** 2 + (w[1] - my) ** 2 < r2 - 1e-9 for w in witnesses)


def _rng_keep(pu: Position, pv: Position, witnesses: Sequence[Position]) -> bool:
    duv = distance(pu, pv)
    return not any(max(distance(pu, w), distance(pv, w)) < duv - 1e-9 for w in witnesses)


def planar_neighbors(u: int, pos: Mapping[int, Position], nbrs: Sequence[int],
                     rule: str = "gabriel") -> List[int]:
    """Planar subset of ``u``'s neighbors, using only ``u``'s own neighborhood as witnesses."""
    keep = _gabriel_keep if rule == "gabriel" else _rng_keep
    if rule not in ("gabriel", "rng"):
        raise ValueError(f"unknown planarization rule {rule!r}")
    pu = pos[u]
    out = []
    for v in nbrs:
        wit = [pos[w] for w in nbrs if w != v]
        if keep(pu, pos[v], wit):
            out.append(v)
    return out


def planarize(dep: Deployment, rule: str = "gabriel") -> PlanarAdjacency:
    adj = adjacency(dep)
    pos = {n.id: n.pos for n in dep.nodes}
    return {u: planar_neighbors(u, pos, adj[u], rule) for u in adj}


# -- GPSR ----------------------------------------------------------------

@dataclass
class PerimeterHeader:
    mode: str = "greedy"
    entry_point: Optional[Position] = None   # Lp
    face_point: Optional[Position] = None    # Lf
    first_edge: Optional[Tuple[int, int]] = None
    prev_pos: Optional[Position] = None


def _bearing(a: Position, b: Position) -> float:
    return math.atan2(b[1] - a[1], b[0] - a[0])


def ccw_next(u_pos: Position, ref: Position, options: Mapping[int, Position],
             exclude_zero: bool = True) -> Optional[int]:
    """First neighbor counterclockwise about ``u_pos`` from the ray u->ref."""
    if not options:
        return None
    base = _bearing(u_pos, ref)
    best, best_key = None, None
    for v, p in options.items():
        delta = (_bearing(u_pos, p) - base) % (2 * math.pi)
        if exclude_zero and delta < 1e-12:
            delta = 2 * math.pi
        key = (delta, v)
        if best_key is None or key < best_key:
            best, best_key = v, key
    return best


def gpsr_forward(u: int, u_pos: Position, d: int, d_pos: Position,
                 nbrs: Mapping[int, Position], hdr: PerimeterHeader,
                 rule: str = "gabriel"):
    """One GPSR forwarding step. Returns ``(next_hop or None, drop_reason)``."""
    if d in nbrs:
        hdr.mode = "greedy"
        return d, None
    here = distance(u_pos, d_pos)
    if hdr.mode == "perimeter" and here < distance(hdr.entry_point, d_pos):
        hdr.mode = "greedy"
    if hdr.mode == "greedy":
        closer = [(v, p) for v, p in nbrs.items() if distance(p, d_pos) < here]
        if closer:
            return min(closer, key=lambda c: (distance(c[1], d_pos), c[0]))[0], None
        hdr.mode = "perimeter"
        hdr.entry_point = u_pos
        hdr.face_point = u_pos
        ref = d_pos
        fresh = True
    else:
        ref = hdr.prev_pos
        fresh = False

    pos = dict(nbrs)
    pos[u] = u_pos
    planar = {v: nbrs[v] for v in planar_neighbors(u, pos, sorted(nbrs), rule)}
    nxt = ccw_next(u_pos, ref, planar, exclude_zero=not fresh)
    if nxt is None:
        return None, "perimeter_loop"
    # face change: hop to the adjacent face when this edge crosses Lf->D closer to D
    for _ in range(len(planar) + 1):
        cross = segment_intersection(u_pos, planar[nxt], hdr.face_point, d_pos)
        if cross is None or distance(cross, d_pos) >= distance(hdr.face_point, d_pos) - 1e-9:
            break
        hdr.face_point = cross
        nxt = ccw_next(u_pos, planar[nxt], planar)
        hdr.first_edge = (u, nxt)
    if fresh:
        hdr.first_edge = (u, nxt)
    elif hdr.first_edge == (u, nxt):
        return None, "perimeter_loop"
    return nxt, None


class GpsrRouter:
    name = "gpsr"

    def __init__(self, planarization: str = "gabriel"):
        self.rule = planarization

    def prepare(self, sim):
        pass

    def decide(self, sim, node, pkt):
        if pkt.perimeter is None:
            pkt.perimeter = PerimeterHeader()
        hdr = pkt.perimeter
        nbrs = {e.id: e.pos for e in node.live_neighbors(sim.now)}
        nxt, reason = gpsr_forward(node.id, node.pos, pkt.sink, sim.pos(pkt.sink),
                                   nbrs, hdr, self.rule)
        if nxt is None:
            return Drop(reason)
        hdr.prev_pos = node.pos
        return Forward(nxt, hdr.mode)


# -- TPGF ----------------------------------------------------------------

@dataclass
class TpgfLabels:
    consumed: Set[int] = field(default_factory=set)
    blocked: Set[int] = field(default_factory=set)


@dataclass
class TpgfPathSet:
    paths: List[List[int]]
    labels: TpgfLabels

    def to_json(self) -> str:
        return json.dumps({"paths": self.paths,
                           "consumed": sorted(self.labels.consumed),
                           "blocked": sorted(self.labels.blocked)})


def tpgf_explore(adj: Mapping[int, Sequence[int]], pos: Mapping[int, Position],
                 src: int, sink: int, labels: TpgfLabels) -> Optional[List[int]]:
    """Greedy depth-first search toward ``sink`` with step-back-and-mark.

    Dead ends are added to ``labels.blocked`` and stay blocked for later
    explorations.
    """
    if src in labels.blocked:
        return None
    spos = pos[sink]
    path = [src]
    on_path = {src}
    while path:
        x = path[-1]
        if sink in adj[x]:
            return path + [sink]
        options = [v for v in adj[x]
                   if v != sink and v not in on_path
                   and v not in labels.consumed and v not in labels.blocked]
        if options:
            v = min(options, key=lambda v: (distance(pos[v], spos), v))
            path.append(v)
            on_path.add(v)
        else:
            labels.blocked.add(x)
            path.pop()
            on_path.discard(x)
    return None


def tpgf_optimize(path: Sequence[int], adj: Mapping[int, Sequence[int]]) -> List[int]:
    """Shortcut detours: jump from each node to the farthest later node in range."""
    path = list(path)
    i = 0
    while i < len(path) - 1:
        nbrs = set(adj[path[i]])
        for k in range(len(path) - 1, i + 1, -1):
            if path[k] in nbrs:
                path = path[:i + 1] + path[k:]
                break
        i += 1
    return path


def tpgf_multipath(dep: Deployment, src: Optional[int] = None, sink: Optional[int] = None,
                   max_paths: int = 8, adj=None) -> TpgfPathSet:
    if max_paths < 1:
        raise ValueError("max_paths must be >= 1")
    src = dep.source if src is None else src
    sink = dep.sink if sink is None else sink
    adj = adjacency(dep) if adj is None else adj
    pos = {n.id: n.pos for n in dep.nodes}
    labels = TpgfLabels()
    paths: List[List[int]] = []
    while len(paths) < max_paths:
        found = tpgf_explore(adj, pos, src, sink, labels)
        if found is None:
            break
        best = tpgf_optimize(found, adj)
        paths.append(best)
        interior = best[1:-1]
        if not interior:
            break
        labels.consumed.update(interior)
    return TpgfPathSet(paths, labels)


class TpgfRouter:
    """Source-routes each data packet round-robin over the precomputed path set."""
    name = "tpgf"

    def __init__(self, max_paths: int = 8):
        self.max_paths = max_paths
        self.pathset: Optional[TpgfPathSet] = None
        self.counts: List[int] = []
        self._next = 0

    def prepare(self, sim):
        alive = [n.id for n in sim.nodes if n.alive]
        full = adjacency(sim.dep)
        adj = {u: [v for v in full[u] if v in alive] if u in alive else [] for u in full}
        self.pathset = tpgf_multipath(sim.dep, max_paths=self.max_paths, adj=adj)
        self.counts = [0] * len(self.pathset.paths)

    def decide(self, sim, node, pkt):
        if pkt.route is None:
            if not self.pathset.paths:
                return Drop("no_path")
            k = self._next % len(self.pathset.paths)
            self._next += 1
            self.counts[k] += 1
            pkt.route = self.pathset.paths[k]
        i = pkt.route.index(node.id)
        return Forward(pkt.route[i + 1], "source_route")

    def run_info(self) -> dict:
        return {"paths": len(self.pathset.paths) if self.pathset else 0,
                "path_load": list(self.counts)}
