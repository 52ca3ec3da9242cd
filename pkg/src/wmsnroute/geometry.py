"""Planar geometry helpers shared by every forwarding rule.

Positions are plain ``(x, y)`` tuples in meters. Angles cross the API in
degrees.
"""
from __future__ import annotations

import math
from typing import Tuple

Position = Tuple[float, float]

# magnitudes below this are treated as zero (meters)
EPS = 1e-12


def distance(a: Position, b: Position) -> float:
    return math.hypot(b[0] - a[0], b[1] - a[1])


def _rays(u: Position, v: Position, d: Position):
    vx, vy = v[0] - u[0], v[1] - u[1]
    dx, dy = d[0] - u[0], d[1] - u[1]
    if math.hypot(vx, vy) < EPS or math.hypot(dx, dy) < EPS:
        raise ValueError(f"degenerate angle: v={v} d={d} coincide with u={u}")
    return vx, vy, dx, dy


def signed_angle(u: Position, v: Position, d: Position) -> float:
    """Angle from ray u->d to ray u->v, counterclockwise positive, in (-180, 180]."""
    vx, vy, dx, dy = _rays(u, v, d)
    cross = dx * vy - dy * vx
    dot = dx * vx + dy * vy
    if abs(cross) < EPS * max(1.0, abs(dot)):
        return 0.0 if dot > 0 else 180.0
    return math.degrees(math.atan2(cross, dot))


def angle_offset(u: Position, v: Position, d: Position) -> float:
    """Unsigned angle at ``u`` between u->v and u->d, in [0, 180]."""
    return abs(signed_angle(u, v, d))


def projection_advance(u: Position, v: Position, d: Position) -> float:
    """Scalar projection of u->v onto the unit vector u->d (negative if v is behind u)."""
    dx, dy = d[0] - u[0], d[1] - u[1]
    norm = math.hypot(dx, dy)
    if norm < EPS:
        raise ValueError(f"degenerate projection: d={d} coincides with u={u}")
    return ((v[0] - u[0]) * dx + (v[1] - u[1]) * dy) / norm


def segment_intersection(p1: Position, p2: Position, q1: Position, q2: Position):
    """Proper or touching intersection point of segments p1p2 and q1q2, else None."""
    rx, ry = p2[0] - p1[0], p2[1] - p1[1]
    sx, sy = q2[0] - q1[0], q2[1] - q1[1]
    denom = rx * sy - ry * sx
    if abs(denom) < EPS:
        return None
    qpx, qpy = q1[0] - p1[0], q1[1] - p1[1]
    t = (qpx * sy - qpy * sx) / denom
    s = (qpx * ry - qpy * rx) / denom
    if -1e-12 <= t <= 1 + 1e-12 and -1e-12 <= s <= 1 + 1e-12:
        return (p1[0] + t * rx, p1[1] + t * ry)
    return None


def segments_cross(p1: Position, p2: Position, q1: Position, q2: Position) -> bool:
    """True when the open segments intersect at a single interior point."""

    def orient(a, b, c):
        val = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        if abs(val) < 1e-9:
            return 0
        return 1 if val > 0 else -1

    if {p1, p2} & {q1, q2}:
        return False
    return (orient(p1, p2, q1) * orient(p1, p2, q2) < 0
            and orient(q1, q2, p1) * orient(q1, q2, p2) < 0)
