"""Command line front end: ``run`` a sweep, ``topo`` generate/inspect, ``compare`` results.

Exit codes: 0 ok, 1 invalid config or arguments, 2 topology failure,
3 integrity violation.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import math
import sys
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from .metrics import (LED_COLUMNS, METRICS_COLUMNS, IntegrityError, check_integrity,
                      compute_metrics, read_csv, write_csv)
from .scenario import ConfigError, ExperimentPlan, TopologySpec, simulate
from .topology import Field, TopologyError, is_connected, min_pairwise_distance

log = logging.getLogger("wmsnroute")

EXIT_OK, EXIT_CONFIG, EXIT_TOPOLOGY, EXIT_INTEGRITY = 0, 1, 2, 3

DECISION_COLUMNS = ["time", "node", "uid", "mode", "alpha", "index", "scores", "next_hop"]
EVENT_COLUMNS = ["time_s", "event_kind", "node", "stream", "seq", "detail"]


def config_line(config: dict) -> str:
    return "config=" + json.dumps(config, sort_keys=True, separators=(",", ":"))


def parse_seeds(text: str) -> List[int]:
    """``"1,2,5"`` or ``"1-10"`` (inclusive) or a mix of both; repeats are dropped."""
    seeds = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            lo, hi = (int(x) for x in part.split("-", 1))
            if hi < lo:
                raise ValueError(f"empty seed range {part!r}")
            seeds.extend(range(lo, hi + 1))
        else:
            seeds.append(int(part))
    if not seeds:
        raise ValueError("no seeds given")
    return list(dict.fromkeys(seeds))


# --------------------------------------------------------------------- run

@dataclass
class RunOutput:
    metrics_csv: str
    led_csv: str
    traces: Dict[str, str]
    records: list


def execute_plan(plan: ExperimentPlan, trace: bool = False) -> RunOutput:
    """Run every scenario of ``plan``; protocols share one deployment per (topology, seed).

    Raises ``TopologyError`` or ``IntegrityError``; nothing is written here.
    """
    config = dict(plan.config)
    if trace:
        config["trace"] = True
    deployments = {}
    rows, led_rows, records, traces = [], [], [], {}
    for sc in plan.scenarios:
        if trace and not sc.trace:
            sc = dataclasses.replace(sc, trace=True)
        key = (json.dumps(dataclasses.asdict(sc.topology), sort_keys=True), sc.seed)
        if key not in deployments:
            deployments[key] = sc.topology.build(sc.seed)
        dep, resampled = deployments[key]
        result, _ = simulate(sc, dep)
        check_integrity(result)
        rec = compute_metrics(result, topology=sc.topology.label(), seed=sc.seed,
                              meta={"resampled": resampled})
        records.append(rec)
        rows.append(rec.row())
        led_rows.extend(rec.led_rows())
        if sc.trace:
            traces[f"decisions_{rec.run_id()}.csv"] = write_csv(
                [_decision_row(d) for d in result.decisions], DECISION_COLUMNS,
                config_line(config))
            traces[f"events_{rec.run_id()}.csv"] = write_csv(
                [dict(zip(EVENT_COLUMNS, e)) for e in result.events], EVENT_COLUMNS,
                config_line(config))
    header = config_line(config)
    return RunOutput(write_csv(rows, METRICS_COLUMNS, header),
                     write_csv(led_rows, LED_COLUMNS, header), traces, records)


def _decision_row(d) -> dict:
    time, node, uid, mode, alpha, index, scores, nxt = d
    return {"time": time, "node": node, "uid": uid, "mode": mode, "alpha": alpha,
            "index": index, "next_hop": nxt,
            "scores": "" if not scores else ";".join(repr(float(s)) for s in scores)}


def cmd_run(args) -> int:
    try:
        seeds = parse_seeds(args.seeds) if args.seeds else None
        plan = ExperimentPlan.load(args.config, seeds)
        if args.allow_disconnected:
            plan = ExperimentPlan(
                [dataclasses.replace(s, topology=dataclasses.replace(s.topology,
                                                                     ensure_connected=False))
                 for s in plan.scenarios],
                {**plan.config, "topologies": [{**t, "ensure_connected": False}
                                               for t in plan.config["topologies"]]})
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        out = execute_plan(plan, trace=args.trace)
    except TopologyError as exc:
        print(f"topology error: {exc}", file=sys.stderr)
        return EXIT_TOPOLOGY
    except IntegrityError as exc:
        print(f"integrity violation: {exc}", file=sys.stderr)
        return EXIT_INTEGRITY
    dest = Path(args.out)
    dest.mkdir(parents=True, exist_ok=True)
    (dest / "metrics.csv").write_text(out.metrics_csv)
    (dest / "led.csv").write_text(out.led_csv)
    if out.traces:
        tdir = dest / "trace"
        tdir.mkdir(exist_ok=True)
        for name, text in sorted(out.traces.items()):
            (tdir / name).write_text(text)
    print(f"{len(out.records)} runs -> {dest / 'metrics.csv'}")
    return EXIT_OK


# -------------------------------------------------------------------- topo

def _topology_from_args(args) -> TopologySpec:
    holes = None
    if args.hole:
        holes = tuple(tuple(float(x) for x in h.split(",")) for h in args.hole)
    return TopologySpec(kind=args.kind, n=args.n, holes=holes, min_sep=args.min_sep,
                        path=getattr(args, "file", None),
                        ensure_connected=not args.allow_disconnected)


def summarize(dep) -> dict:
    return {"name": dep.name, "nodes": len(dep), "relays": len(dep.relays),
            "connected": is_connected(dep),
            "min_pairwise_distance_m": round(min_pairwise_distance(dep), 6),
            "fingerprint": dep.fingerprint()}


def cmd_topo(args) -> int:
    try:
        if args.action == "inspect" and args.file:
            args.kind = "file"
        spec = _topology_from_args(args)
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        # inspect must see the deployment as it is, so never resample there
        if args.action == "inspect":
            spec = dataclasses.replace(spec, ensure_connected=False)
        dep, resampled = spec.build(args.seed)
    except TopologyError as exc:
        print(f"topology error: {exc}", file=sys.stderr)
        return EXIT_TOPOLOGY
    info = summarize(dep)
    if args.action == "generate":
        info["resampled"] = resampled
        if args.out:
            Path(args.out).write_text(dep.to_json())
            info["written"] = args.out
        else:
            print(dep.to_json())
            return EXIT_OK
    for k, v in info.items():
        print(f"{k}: {json.dumps(v)}")
    if not info["connected"] and not args.allow_disconnected:
        print("source and sink are disconnected", file=sys.stderr)
        return EXIT_TOPOLOGY
    return EXIT_OK


# ----------------------------------------------------------------- compare

@dataclass(frozen=True)
class Claim:
    """Directional claim checked per seed: ``chain[0] op chain[1] op ...``."""
    name: str
    column: str
    chain: Tuple[str, ...]
    op: str
    min_fraction: float
    min_tpgf_paths: int = 2

    def holds(self, values: Sequence[float]) -> bool:
        ops = {">": lambda a, b: a > b, "<": lambda a, b: a < b,
               "<=": lambda a, b: a <= b, ">=": lambda a, b: a >= b}
        return all(ops[self.op](a, b) for a, b in zip(values, values[1:]))

    def text(self, chain) -> str:
        return f" {self.op} ".join(p.upper() for p in chain)


CLAIMS = (
    Claim("ged_mean", "ged_mean_pct", ("agem", "gpsr"), ">", 0.8),
    Claim("ged_std", "ged_std_pct", ("agem", "gpsr"), "<", 0.8),
    Claim("loss", "loss_pct", ("agem", "gpsr"), "<=", 0.8),
    Claim("delay", "delay_mean_s", ("tpgf", "agem", "gpsr"), "<=", 0.7),
    Claim("relays_used", "relays_used", ("agem", "gpsr"), ">", 1.0),
)


class CompareError(ValueError):
    pass


def _num(v) -> Optional[float]:
    if v is None or v == "":
        return None
    return float(v)


def compare_rows(rows: Sequence[dict], claims=CLAIMS):
    """Per-protocol means and claim verdicts, grouped by topology.

    Returns ``(table_rows, verdicts)``. Raises ``CompareError`` when fewer
    than two protocols are present or shared (topology, seed) pairs were run
    on different deployments.
    """
    protocols = sorted({r["protocol"] for r in rows})
    if len(protocols) < 2:
        raise CompareError(f"need at least two protocols, got {protocols}")
    by_key = defaultdict(dict)
    for r in rows:
        key = (r["topology"], int(r["seed"]))
        if r["protocol"] in by_key[key]:
            raise CompareError(f"duplicate run {r['protocol']} {key}")
        by_key[key][r["protocol"]] = r
    for key, runs in sorted(by_key.items()):
        prints = {p: r["deployment"] for p, r in runs.items()}
        if len(set(prints.values())) > 1:
            raise CompareError(f"topology {key[0]} seed {key[1]}: protocols ran on different "
                               f"deployments {prints}; comparisons must share deployments")
    table = []
    for topo in sorted({k[0] for k in by_key}):
        for p in protocols:
            sel = [runs[p] for (t, _), runs in by_key.items() if t == topo and p in runs]
            if not sel:
                continue
            row = {"topology": topo, "protocol": p, "runs": len(sel)}
            for col in ("ged_mean_pct", "ged_std_pct", "delay_mean_s", "loss_pct",
                        "relays_used"):
                vals = [_num(r.get(col)) for r in sel]
                vals = [v for v in vals if v is not None]
                row[col] = sum(vals) / len(vals) if vals else None
            table.append(row)
    verdicts = []
    for topo in sorted({k[0] for k in by_key}):
        seeds = sorted(s for t, s in by_key if t == topo)
        for claim in claims:
            passed = total = 0
            used_chain = None
            for s in seeds:
                runs = by_key[(topo, s)]
                chain = [p for p in claim.chain if p in runs]
                if "tpgf" in chain and (_num(runs["tpgf"].get("paths")) or 0) < claim.min_tpgf_paths:
                    chain.remove("tpgf")
                if len(chain) < 2:
                    continue
                used_chain = used_chain or tuple(p for p in claim.chain if p in runs)
                vals = [_num(runs[p].get(claim.column)) for p in chain]
                total += 1
                if None not in vals and claim.holds(vals):
                    passed += 1
            if not total:
                continue
            need = math.ceil(claim.min_fraction * total - 1e-9)
            ok = passed >= need
            verdicts.append({"topology": topo, "claim": claim.name,
                             "statement": claim.text(used_chain), "passed": passed,
                             "total": total, "need": need, "verdict": "pass" if ok else "fail"})
    return table, verdicts


def verdict_line(v: dict) -> str:
    return (f"[{v['topology']}] {v['claim']}: {v['statement']} ({v['verdict']}) "
            f"{v['passed']}/{v['total']} seeds, need {v['need']}")


def cmd_compare(args) -> int:
    rows = []
    try:
        for path in args.metrics:
            rows.extend(read_csv(Path(path).read_text()))
        table, verdicts = compare_rows(rows)
    except (OSError, KeyError, CompareError) as exc:
        print(f"compare refused: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    cols = ["topology", "protocol", "runs", "ged_mean_pct", "ged_std_pct", "delay_mean_s",
            "loss_pct", "relays_used"]
    print(write_csv(table, cols), end="")
    print()
    for v in verdicts:
        print(verdict_line(v))
    if args.out:
        Path(args.out).write_text(write_csv(
            verdicts, ["topology", "claim", "statement", "passed", "total", "need", "verdict"]))
    return EXIT_OK


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wmsnroute",
                                description="Geographic multipath routing simulator for WMSNs.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="verb", required=True)

    r = sub.add_parser("run", help="execute an experiment plan")
    r.add_argument("--config", required=True, help="plan JSON")
    r.add_argument("--out", required=True, help="output directory")
    r.add_argument("--trace", action="store_true", help="also write per-run trace CSVs")
    r.add_argument("--seeds", help="override seeds, e.g. 1-10 or 1,4,9")
    r.add_argument("--allow-disconnected", action="store_true",
                   help="do not resample deployments whose source and sink are disconnected")
    r.set_defaults(func=cmd_run)

    t = sub.add_parser("topo", help="generate or inspect a deployment")
    t.add_argument("action", choices=["generate", "inspect"])
    t.add_argument("file", nargs="?", help="deployment JSON to inspect")
    t.add_argument("--kind", default="plain", choices=["plain", "holes", "grid"])
    t.add_argument("--n", type=int, default=30)
    t.add_argument("--seed", type=int, default=1)
    t.add_argument("--min-sep", type=float, default=1.0)
    t.add_argument("--hole", action="append", metavar="X,Y,R",
                   help="hole disc; repeat for several (default: one centered hole)")
    t.add_argument("--out", help="write the deployment JSON here")
    t.add_argument("--allow-disconnected", action="store_true")
    t.set_defaults(func=cmd_topo)

    c = sub.add_parser("compare", help="compare protocols from metrics CSVs")
    c.add_argument("metrics", nargs="+")
    c.add_argument("--out", help="write verdicts CSV here")
    c.set_defaults(func=cmd_compare)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
