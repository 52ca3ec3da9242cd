"""Independent reference implementations used as test oracles.

Written from the textbook definitions with different formulas than the
package (acos instead of atan2, explicit cross-product sides, networkx
for graph questions) so agreement is meaningful.
"""
import math

import networkx as nx

from wmsnroute.policies import CandidateView, PolicyKind


def angle_acos(u, v, d):
    ax, ay = v[0] - u[0], v[1] - u[1]
    bx, by = d[0] - u[0], d[1] - u[1]
    c = (ax * bx + ay * by) / (math.hypot(ax, ay) * math.hypot(bx, by))
    return math.degrees(math.acos(max(-1.0, min(1.0, c))))


def cross(u, v, d):
    """z of (d - u) x (v - u): > 0 when v is counterclockwise of ray u->d."""
    return (d[0] - u[0]) * (v[1] - u[1]) - (d[1] - u[1]) * (v[0] - u[0])


def dist(a, b):
    return math.sqrt((a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2)


def _pick(items, key):
    best = None
    for nid, p in items:
        k = (key(p), nid)
        if best is None or k < best[0]:
            best = (k, nid)
    return None if best is None else best[1]


def oracle_compass(u, d, cands):
    return _pick(cands, lambda p: angle_acos(u, p, d))


def oracle_greedy(u, d, cands):
    return _pick(cands, lambda p: dist(p, d))


def oracle_mfr(u, d, cands):
    # foot of the perpendicular from v onto line ud, then its distance to d
    def foot_to_d(p):
        bx, by = d[0] - u[0], d[1] - u[1]
        t = ((p[0] - u[0]) * bx + (p[1] - u[1]) * by) / (bx * bx + by * by)
        foot = (u[0] + t * bx, u[1] + t * by)
        return dist(foot, d)
    return _pick(cands, foot_to_d)


def oracle_nn(u, d, cands, alpha):
    return _pick([c for c in cands if angle_acos(u, c[1], d) <= alpha], lambda p: dist(u, p))


def oracle_fn(u, d, cands, alpha):
    return _pick([c for c in cands if angle_acos(u, c[1], d) <= alpha], lambda p: -dist(u, p))


def _halves(u, d, cands):
    above = [c for c in cands if cross(u, c[1], d) >= 0]
    below = [c for c in cands if cross(u, c[1], d) <= 0]
    key = lambda c: (angle_acos(u, c[1], d), c[0])
    return sorted(above, key=key), sorted(below, key=key)


def oracle_random_compass(u, d, cands, rng):
    above, below = _halves(u, d, cands)
    v1 = above[0][0] if above else None
    v2 = below[0][0] if below else None
    if v1 is None or v2 is None or v1 == v2:
        return v1 if v1 is not None else v2
    return v1 if rng.random() < 0.5 else v2


def oracle_greedy_compass(u, d, cands):
    above, below = _halves(u, d, cands)
    if above and below:
        pair = [above[0], below[0]]
    else:
        pair = (above or below)[:2]
    return _pick(pair, lambda p: dist(p, d))


# -- graphs ----------------------------------------------------------------

def unit_disc_graph(positions, radius):
    """networkx graph over ``{id: (x, y)}`` with edges at distance <= radius."""
    g = nx.Graph()
    ids = sorted(positions)
    g.add_nodes_from(ids)
    for i, a in enumerate(ids):
        for b in ids[i + 1:]:
            if dist(positions[a], positions[b]) <= radius:
                g.add_edge(a, b)
    return g


def deployment_graph(dep):
    return unit_disc_graph({n.id: n.pos for n in dep.nodes}, dep.radio_range)


def brute_neighbors(dep, u):
    pu = dep.nodes[u].pos
    return sorted(n.id for n in dep.nodes if n.id != u and dist(pu, n.pos) <= dep.radio_range)


def proper_cross(p1, p2, q1, q2):
    """Open segments share exactly one interior point (shared endpoints excluded)."""
    if len({p1, p2, q1, q2}) < 4:
        return False

    def orient(a, b, c):
        v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        return 0 if abs(v) < 1e-9 else (1 if v > 0 else -1)

    return (orient(p1, p2, q1) * orient(p1, p2, q2) < 0
            and orient(q1, q2, p1) * orient(q1, q2, p2) < 0)


# -- random views and dispatch ----------------------------------------------

def random_view(rng, k_max=12):
    u = (rng.uniform(0, 500), rng.uniform(0, 200))
    while True:
        d = (rng.uniform(0, 500), rng.uniform(0, 200))
        if math.dist(u, d) > 1:
            break
    cands = []
    for i in range(rng.randint(0, k_max)):
        r, t = rng.uniform(1, 80), rng.uniform(0, 2 * math.pi)
        cands.append((i + 1, (u[0] + r * math.cos(t), u[1] + r * math.sin(t))))
    return CandidateView(0, u, d, tuple(cands))


def oracle_select(view, policy, rng):
    u, d, c = view.self_pos, view.dest, list(view.candidates)
    k = policy.kind
    if k is PolicyKind.COMPASS:
        return oracle_compass(u, d, c)
    if k is PolicyKind.GREEDY:
        return oracle_greedy(u, d, c)
    if k is PolicyKind.MFR:
        return oracle_mfr(u, d, c)
    if k is PolicyKind.NEAREST:
        return oracle_nn(u, d, c, policy.alpha)
    if k is PolicyKind.FARTHEST:
        return oracle_fn(u, d, c, policy.alpha)
    if k is PolicyKind.RANDOM_COMPASS:
        return oracle_random_compass(u, d, c, rng)
    return oracle_greedy_compass(u, d, c)
