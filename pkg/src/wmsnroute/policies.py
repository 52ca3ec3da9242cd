"""Stateless geographic next-hop policies.

Every policy works on a :class:`CandidateView` and returns the chosen node
id, or ``None`` when its candidate set is empty. Ties always go to the
lowest node id.
"""
from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .geometry import Position, angle_offset, distance, projection_advance, signed_angle

Candidate = Tuple[int, Position]


class PolicyKind(enum.Enum):
    COMPASS = "compass"
    RANDOM_COMPASS = "random_compass"
    GREEDY = "greedy"
    MFR = "mfr"
    NEAREST = "nearest_neighbor"
    FARTHEST = "farthest_neighbor"
    GREEDY_COMPASS = "greedy_compass"


@dataclass(frozen=True)
class Policy:
    kind: PolicyKind
    alpha: Optional[float] = None

    def __post_init__(self):
        needs_alpha = self.kind in (PolicyKind.NEAREST, PolicyKind.FARTHEST)
        if needs_alpha and (self.alpha is None or not 0 < self.alpha <= 180):
            raise ValueError(f"{self.kind.value} needs alpha in (0, 180]")


@dataclass(frozen=True)
class CandidateView:
    self_id: int
    self_pos: Position
    dest: Position
    candidates: Tuple[Candidate, ...]

    def __post_init__(self):
        if any(c[0] == self.self_id for c in self.candidates):
            raise ValueError("candidates must exclude the forwarder itself")
        if distance(self.self_pos, self.dest) == 0:
            raise ValueError("forwarder already sits on the destination")


def _argmin(items: Sequence[Candidate], key) -> Optional[int]:
    if not items:
        return None
    return min(items, key=lambda c: (key(c), c[0]))[0]


def _sides(view: CandidateView):
    """Split candidates into the counterclockwise (s >= 0) and clockwise (s <= 0) halves.

    A candidate on the ray u->d belongs to both.
    """
    u, d = view.self_pos, view.dest
    ccw, cw = [], []
    for c in view.candidates:
        s = signed_angle(u, c[1], d)
        if s >= 0:
            ccw.append((c, s))
        if s <= 0:
            cw.append((c, -s))
    ccw.sort(key=lambda e: (e[1], e[0][0]))
    cw.sort(key=lambda e: (e[1], e[0][0]))
    return [e[0] for e in ccw], [e[0] for e in cw]


def random_compass_pair(view: CandidateView) -> Tuple[Optional[int], Optional[int]]:
    ccw, cw = _sides(view)
    return (ccw[0][0] if ccw else None, cw[0][0] if cw else None)


def select_next_hop(view: CandidateView, policy: Policy,
                    rng: Optional[random.Random] = None) -> Optional[int]:
    u, d = view.self_pos, view.dest
    cands = view.candidates
    kind = policy.kind

    if kind is PolicyKind.COMPASS:
        return _argmin(cands, lambda c: angle_offset(u, c[1], d))

    if kind is PolicyKind.GREEDY:
        return _argmin(cands, lambda c: distance(c[1], d))

    if kind is PolicyKind.MFR:
        # |v'd| with v' the foot of v on line ud; also right when v' overshoots d
        ud = distance(u, d)
        return _argmin(cands, lambda c: abs(ud - projection_advance(u, c[1], d)))

    if kind in (PolicyKind.NEAREST, PolicyKind.FARTHEST):
        cone = [c for c in cands if angle_offset(u, c[1], d) <= policy.alpha]
        sign = 1.0 if kind is PolicyKind.NEAREST else -1.0
        return _argmin(cone, lambda c: sign * distance(u, c[1]))

    if kind is PolicyKind.RANDOM_COMPASS:
        v1, v2 = random_compass_pair(view)
        if v1 is None or v2 is None or v1 == v2:
            return v1 if v1 is not None else v2
        if rng is None:
            raise ValueError("random compass needs a seeded rng")
        return v1 if rng.random() < 0.5 else v2

    if kind is PolicyKind.GREEDY_COMPASS:
        pair = greedy_compass_pair(view)
        return _argmin(pair, lambda c: distance(c[1], d))

    raise ValueError(f"unhandled policy {kind}")


def greedy_compass_pair(view: CandidateView) -> List[Candidate]:
    """Tightest counterclockwise and clockwise candidates around u->d.

    With every candidate on one side the pair falls back to the two
    smallest-angle candidates of that side.
    """
    ccw, cw = _sides(view)
    if ccw and cw:
        pair = [ccw[0], cw[0]]
    else:
        pair = (ccw or cw)[:2]
    return list({c[0]: c for c in pair}.values())
