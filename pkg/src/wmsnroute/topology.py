"""Deployment generators (plain, holes, grid) and the unit-disc connectivity graph."""
from __future__ import annotations

import hashlib
import json
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .geometry import Position, distance

log = logging.getLogger(__name__)

SOURCE_POS = (10.0, 90.0)
SINK_POS = (490.0, 90.0)
RADIO_RANGE = 80.0
MAX_ATTEMPTS = 10_000

ROLES = ("source", "sink", "relay")


class TopologyError(RuntimeError):
    """Raised when a deployment cannot be generated."""


@dataclass(frozen=True)
class Field:
    width: float = 500.0
    height: float = 200.0

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("field dimensions must be positive")


@dataclass(frozen=True)
class Hole:
    center: Position
    radius: float

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("hole radius must be non-negative")

    def contains(self, p: Position) -> bool:
        return distance(self.center, p) < self.radius


# hole layouts centered in the 210-290 m band
DEFAULT_HOLES = {
    1: (Hole((250.0, 100.0), 40.0),),
    2: (Hole((250.0, 45.0), 40.0), Hole((250.0, 155.0), 40.0)),
}


@dataclass(frozen=True)
class NodeSpec:
    id: int
    pos: Position
    role: str


@dataclass(frozen=True)
class Deployment:
    nodes: Tuple[NodeSpec, ...]
    radio_range: float = RADIO_RANGE
    field: Field = field(default_factory=Field)
    name: str = "custom"

    def __post_init__(self):
        ids = [n.id for n in self.nodes]
        if ids != list(range(len(ids))):
            raise ValueError("node ids must be 0..n-1 in order")
        roles = [n.role for n in self.nodes]
        if roles.count("source") != 1 or roles.count("sink") != 1:
            raise ValueError("deployment needs exactly one source and one sink")
        if any(r not in ROLES for r in roles):
            raise ValueError(f"unknown role in {set(roles)}")

    def __len__(self):
        return len(self.nodes)

    @property
    def source(self) -> int:
        return next(n.id for n in self.nodes if n.role == "source")

    @property
    def sink(self) -> int:
        return next(n.id for n in self.nodes if n.role == "sink")

    @property
    def relays(self) -> List[int]:
        return [n.id for n in self.nodes if n.role == "relay"]

    def pos(self, u: int) -> Position:
        return self.nodes[u].pos

    def positions(self) -> np.ndarray:
        return np.array([n.pos for n in self.nodes], dtype=float)

    # -- serialization -------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "radio_range": self.radio_range,
            "field": {"width": self.field.width, "height": self.field.height},
            "nodes": [{"id": n.id, "x": n.pos[0], "y": n.pos[1], "role": n.role}
                      for n in self.nodes],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Deployment":
        nodes = tuple(NodeSpec(int(e["id"]), (float(e["x"]), float(e["y"])), e["role"])
                      for e in d["nodes"])
        fld = d.get("field", {})
        return cls(nodes, float(d.get("radio_range", RADIO_RANGE)),
                   Field(float(fld.get("width", 500.0)), float(fld.get("height", 200.0))),
                   d.get("name", "custom"))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Deployment":
        return cls.from_dict(json.loads(text))

    def fingerprint(self) -> str:
        payload = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


def _place(n: int, fld: Field, rng: np.random.Generator, min_sep: float,
           holes: Sequence[Hole] = ()) -> List[Position]:
    fixed = [SOURCE_POS, SINK_POS]
    placed = np.empty((n + 2, 2))
    placed[:2] = fixed
    count = 2
    for i in range(n):
        for _ in range(MAX_ATTEMPTS):
            x, y = rng.uniform(0.0, fld.width), rng.uniform(0.0, fld.height)
            if any(h.contains((x, y)) for h in holes):
                continue
            d2 = (placed[:count, 0] - x) ** 2 + (placed[:count, 1] - y) ** 2
            if d2.min() > min_sep * min_sep:
                break
        else:
            raise TopologyError(
                f"could not place relay {i + 1}/{n} after {MAX_ATTEMPTS} attempts "
                f"(min_sep={min_sep} m, field too crowded)")
        placed[count] = (x, y)
        count += 1
    return [tuple(map(float, p)) for p in placed[2:]]


def _assemble(relays: List[Position], radio_range: float, fld: Field, name: str) -> Deployment:
    nodes = [NodeSpec(0, SOURCE_POS, "source")]
    nodes += [NodeSpec(i + 1, p, "relay") for i, p in enumerate(relays)]
    nodes.append(NodeSpec(len(relays) + 1, SINK_POS, "sink"))
    return Deployment(tuple(nodes), radio_range, fld, name)


def gen_plain(n: int, field: Field = Field(), seed=0, min_sep: float = 1.0,
              radio_range: float = RADIO_RANGE) -> Deployment:
    """``n`` uniformly placed relays plus the pinned source and sink."""
    return gen_holes(n, field, (), seed, min_sep, radio_range, name=f"plain{n}")


def gen_holes(n: int, field: Field = Field(), holes: Sequence[Hole] = (), seed=0,
              min_sep: float = 1.0, radio_range: float = RADIO_RANGE,
              name: str | None = None) -> Deployment:
    if n < 1:
        raise ValueError("need at least one relay")
    rng = np.random.default_rng(seed)
    relays = _place(n, field, rng, min_sep, holes)
    return _assemble(relays, radio_range, field, name or f"holes{len(holes)}_{n}")


def gen_grid(radio_range: float = RADIO_RANGE) -> Deployment:
    """26-node grid: 6 columns x 4 rows of relays between source and sink.

    Column pitch 78 m, row pitch 60 m, so axis neighbors are in range and
    diagonal ones (98 m) are not.
    """
    xs = [55.0 + 78.0 * c for c in range(6)]
    ys = [0.0, 60.0, 120.0, 180.0]
    relays = [(x, y) for x in xs for y in ys]
    return _assemble(relays, radio_range, Field(), "grid26")


def neighbors(dep: Deployment, u: int) -> List[int]:
    if not 0 <= u < len(dep):
        raise KeyError(f"unknown node {u}")
    pu = dep.pos(u)
    return [n.id for n in dep.nodes
            if n.id != u and distance(pu, n.pos) <= dep.radio_range]


def adjacency(dep: Deployment) -> Dict[int, List[int]]:
    pts = dep.positions()
    d2 = ((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1)
    inrange = d2 <= dep.radio_range ** 2
    np.fill_diagonal(inrange, False)
    return {u: [int(v) for v in np.flatnonzero(inrange[u])] for u in range(len(dep))}


def reachable(adj: Dict[int, List[int]], start: int) -> set:
    seen = {start}
    todo = deque([start])
    while todo:
        u = todo.popleft()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                todo.append(v)
    return seen


def is_connected(dep: Deployment, a: int | None = None, b: int | None = None) -> bool:
    """Whether ``a`` reaches ``b`` (default source and sink) in the unit-disc graph."""
    a = dep.source if a is None else a
    b = dep.sink if b is None else b
    return b in reachable(adjacency(dep), a)


def min_pairwise_distance(dep: Deployment) -> float:
    pts = dep.positions()
    d2 = ((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1)
    np.fill_diagonal(d2, np.inf)
    return float(np.sqrt(d2.min()))


def connected_deployment(generator, seed: int, *args, max_resamples: int = 1000,
                         **kwargs) -> Tuple[Deployment, int]:
    """Call ``generator`` until source and sink are connected.

    Attempt 0 uses ``seed`` itself, later attempts use the seed pair
    ``[seed, attempt]``. Returns the deployment and the resample count.
    """
    for attempt in range(max_resamples + 1):
        s = seed if attempt == 0 else [seed, attempt]
        dep = generator(*args, seed=s, **kwargs)
        if is_connected(dep):
            if attempt:
                log.info("seed %s: %d disconnected deployments resampled", seed, attempt)
            return dep, attempt
    raise TopologyError(f"seed {seed}: no connected deployment in {max_resamples} resamples")
