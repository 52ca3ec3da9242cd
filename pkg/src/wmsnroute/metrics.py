"""Run metrics: global/local energy distribution, end-to-end delay, loss ratio.

Standard deviations are population (ddof=0). Undefined values are ``None``
and serialize as empty CSV cells.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

DROP_GROUPS = {
    "queue": ("queue_overflow",),
    "void": ("isolated_void", "perimeter_loop", "no_path", "ttl"),
    "dead": ("dead_source", "dead_node", "dead_neighbor"),
}

METRICS_COLUMNS = ["run_id", "protocol", "topology", "n_nodes", "seed", "deployment",
                   "ged_mean_pct", "ged_std_pct", "delay_mean_s", "delay_std_s", "loss_pct",
                   "drops_queue", "drops_void", "drops_dead",
                   "generated", "delivered", "relays_used", "walkbacks", "paths"]
LED_COLUMNS = ["run_id", "bin_lo", "bin_hi", "mean_residual_pct", "node_count"]


class IntegrityError(RuntimeError):
    """A conservation law was violated."""


def ged(residuals: Sequence[float]) -> Tuple[float, float]:
    arr = np.asarray(residuals, dtype=float)
    return float(arr.mean()), float(arr.std())


def led_bins(width: float, bin_width: float = 40.0) -> List[Tuple[float, float]]:
    edges = list(np.arange(0.0, width, bin_width)) + [width]
    return [(float(lo), float(hi)) for lo, hi in zip(edges[:-1], edges[1:])]


def led(xs: Sequence[float], residuals: Sequence[float], width: float,
        bin_width: float = 40.0) -> List[Tuple[float, float, Optional[float], int]]:
    """Per-bin ``(lo, hi, mean residual or None, count)``; bins are [lo, hi) except the last."""
    bins = led_bins(width, bin_width)
    out = []
    for k, (lo, hi) in enumerate(bins):
        last = k == len(bins) - 1
        vals = [r for x, r in zip(xs, residuals) if lo <= x < hi or (last and x == hi)]
        out.append((lo, hi, float(np.mean(vals)) if vals else None, len(vals)))
    return out


def delay_stats(delays: Sequence[float]) -> Tuple[Optional[float], Optional[float]]:
    if len(delays) == 0:
        return None, None
    arr = np.asarray(delays, dtype=float)
    return float(arr.mean()), float(arr.std())


def loss_ratio(sent: int, delivered: int) -> Optional[float]:
    if delivered < 0 or delivered > sent:
        raise IntegrityError(f"delivered={delivered} inconsistent with sent={sent}")
    if sent == 0:
        return None
    return 100.0 * (sent - delivered) / sent


@dataclass
class MetricsRecord:
    protocol: str
    topology: str
    n_nodes: int
    seed: Optional[int]
    deployment: str
    initial_energy: float
    ged_mean: float
    ged_std: float
    led: List[tuple]
    delay_mean: Optional[float]
    delay_std: Optional[float]
    loss_pct: Optional[float]
    generated: int
    delivered: int
    drops: Dict[str, int]
    relays_used: int
    walkbacks: int
    deaths: int
    paths: Optional[int] = None
    std_kind: str = "population"
    meta: dict = field(default_factory=dict)

    @property
    def ged_mean_pct(self) -> float:
        return 100.0 * self.ged_mean / self.initial_energy

    @property
    def ged_std_pct(self) -> float:
        return 100.0 * self.ged_std / self.initial_energy

    def drop_group(self, group: str) -> int:
        return sum(self.drops.get(r, 0) for r in DROP_GROUPS[group])

    def run_id(self) -> str:
        return f"{self.protocol}-{self.topology}-s{self.seed}"

    def row(self) -> dict:
        return {
            "run_id": self.run_id(), "protocol": self.protocol, "topology": self.topology,
            "n_nodes": self.n_nodes, "seed": self.seed, "deployment": self.deployment,
            "ged_mean_pct": self.ged_mean_pct, "ged_std_pct": self.ged_std_pct,
            "delay_mean_s": self.delay_mean, "delay_std_s": self.delay_std,
            "loss_pct": self.loss_pct, "drops_queue": self.drop_group("queue"),
            "drops_void": self.drop_group("void"), "drops_dead": self.drop_group("dead"),
            "generated": self.generated, "delivered": self.delivered,
            "relays_used": self.relays_used, "walkbacks": self.walkbacks, "paths": self.paths,
        }

    def led_rows(self) -> List[dict]:
        return [{"run_id": self.run_id(), "bin_lo": lo, "bin_hi": hi,
                 "mean_residual_pct": None if m is None else 100.0 * m / self.initial_energy,
                 "node_count": c} for lo, hi, m, c in self.led]


def check_integrity(result, rel_tol: float = 1e-9) -> None:
    """Packet conservation, energy bookkeeping and LED/GED consistency for one run."""
    dropped = sum(result.drops.values())
    if result.generated != len(result.delivered) + dropped:
        raise IntegrityError(f"packets: generated={result.generated} delivered="
                             f"{len(result.delivered)} dropped={dropped}")
    drop_total = sum(result.initial) - sum(result.residual)
    if not math.isclose(drop_total, result.energy_spent, rel_tol=rel_tol, abs_tol=1e-12):
        raise IntegrityError(f"energy: network lost {drop_total} J, ledger says "
                             f"{result.energy_spent} J")
    for h in result.hops:
        if h.tx_applied > h.tx_nominal + 1e-15 or h.rx_applied > h.rx_nominal + 1e-15:
            raise IntegrityError(f"hop {h} charged more than its nominal cost")
    mean, _ = ged(result.residual)
    xs = [n.pos[0] for n in result.dep.nodes]
    bins = led(xs, result.residual, result.dep.field.width)
    weighted = sum(m * c for _, _, m, c in bins if c) / sum(c for *_, c in bins)
    if not math.isclose(weighted, mean, rel_tol=rel_tol, abs_tol=1e-15):
        raise IntegrityError(f"LED weighted mean {weighted} != GED mean {mean}")


def compute_metrics(result, topology: str = "", seed: Optional[int] = None,
                    bin_width: float = 40.0, meta: Optional[dict] = None) -> MetricsRecord:
    dep = result.dep
    mean, std = ged(result.residual)
    xs = [n.pos[0] for n in dep.nodes]
    delays = [p.delivered_at - p.created_at for p in result.delivered]
    d_mean, d_std = delay_stats(delays)
    init = result.initial[dep.relays[0]] if dep.relays else result.initial[0]
    relays = set(dep.relays)
    return MetricsRecord(
        protocol=result.protocol, topology=topology or dep.name, n_nodes=len(dep),
        seed=seed, deployment=dep.fingerprint(), initial_energy=init,
        ged_mean=mean, ged_std=std, led=led(xs, result.residual, dep.field.width, bin_width),
        delay_mean=d_mean, delay_std=d_std,
        loss_pct=loss_ratio(result.generated, len(result.delivered)),
        generated=result.generated, delivered=len(result.delivered),
        drops=dict(result.drops),
        relays_used=sum(1 for u in relays if result.data_tx[u] > 0),
        walkbacks=len(result.walkbacks), deaths=len(result.deaths),
        paths=result.extra.get("paths"), meta=meta or {})


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return v


def write_csv(rows: Sequence[dict], columns: Sequence[str], header_comment: str = "") -> str:
    buf = io.StringIO()
    if header_comment:
        buf.write(f"# {header_comment}\n")
    w = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: _fmt(r.get(k)) for k in columns})
    return buf.getvalue()


def read_csv(text: str) -> List[dict]:
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))
