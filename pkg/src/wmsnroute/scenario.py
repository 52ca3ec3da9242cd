"""Scenario and experiment-plan configuration (strict JSON) plus the single-run driver."""
from __future__ import annotations

import dataclasses
import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from .agem import DELEGATE_RULES, AgemRouter, CompassConfig
from .baselines import GpsrRouter, TpgfRouter
from .energy import E_ELEC, EPS_AMP, EnergyModelParams
from .simcore import BeaconConfig, LinkModel, Simulator, TrafficSpec
from .topology import (DEFAULT_HOLES, Deployment, Field, Hole, TopologyError,
                       connected_deployment, gen_grid, gen_holes, gen_plain, is_connected)

PROTOCOLS = ("agem", "geams", "gpsr", "tpgf")


class ConfigError(ValueError):
    """Configuration failed validation."""


def _build(cls, data, where):
    if data is None:
        return cls()
    if not isinstance(data, dict):
        raise ConfigError(f"{where}: expected an object, got {type(data).__name__}")
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - names
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
    try:
        return cls(**data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc


@dataclass(frozen=True)
class EnergyConfig:
    e_elec: float = E_ELEC
    eps_amp: float = EPS_AMP
    initial_energy: float = 1.0
    sink_powered: bool = True

    def __post_init__(self):
        if self.initial_energy <= 0:
            raise ValueError("initial_energy must be positive")


@dataclass(frozen=True)
class RoutingConfig:
    planarization: str = "gabriel"
    tpgf_max_paths: int = 8
    max_hops: int = 255
    walkback_delegate: str = "nearest_self"

    def __post_init__(self):
        if self.walkback_delegate not in DELEGATE_RULES:
            raise ValueError(f"walkback_delegate must be one of {DELEGATE_RULES}")
        if self.planarization not in ("gabriel", "rng"):
            raise ValueError("planarization must be 'gabriel' or 'rng'")
        if self.tpgf_max_paths < 1 or self.max_hops < 1:
            raise ValueError("tpgf_max_paths and max_hops must be >= 1")


@dataclass(frozen=True)
class TopologySpec:
    kind: str = "plain"                 # plain | holes | grid | file
    n: int = 30
    holes: Optional[Tuple[Tuple[float, float, float], ...]] = None
    min_sep: float = 1.0
    path: Optional[str] = None
    ensure_connected: bool = True

    def __post_init__(self):
        if self.kind not in ("plain", "holes", "grid", "file"):
            raise ValueError(f"unknown topology kind {self.kind!r}")
        if self.kind == "file" and not self.path:
            raise ValueError("file topology needs a path")
        if self.kind in ("plain", "holes") and self.n < 1:
            raise ValueError("n must be >= 1")
        if self.holes is not None:
            object.__setattr__(self, "holes", tuple(tuple(map(float, h)) for h in self.holes))
            if any(len(h) != 3 for h in self.holes):
                raise ValueError("holes are [x, y, radius] triples")

    def label(self) -> str:
        if self.kind == "grid":
            return "grid26"
        if self.kind == "file":
            return Path(self.path).stem
        if self.kind == "holes":
            return f"holes{len(self.hole_list())}_{self.n}"
        return f"plain{self.n}"

    def hole_list(self) -> Tuple[Hole, ...]:
        if self.holes is None:
            return DEFAULT_HOLES[1]
        return tuple(Hole((h[0], h[1]), h[2]) for h in self.holes)

    def build(self, seed: int) -> Tuple[Deployment, int]:
        """Deployment for ``seed`` and the number of disconnected resamples."""
        if self.kind == "grid":
            return gen_grid(), 0
        if self.kind == "file":
            try:
                dep = Deployment.from_json(Path(self.path).read_text())
            except (OSError, ValueError, KeyError, TypeError) as exc:
                raise TopologyError(f"cannot load deployment {self.path}: {exc}") from exc
            if self.ensure_connected and not is_connected(dep):
                raise TopologyError(f"{self.path}: source and sink are disconnected")
            return dep, 0
        if self.kind == "plain":
            gen, args = gen_plain, (self.n, Field())
            kw = {"min_sep": self.min_sep}
        else:
            gen, args = gen_holes, (self.n, Field(), self.hole_list())
            kw = {"min_sep": self.min_sep, "name": self.label()}
        if self.ensure_connected:
            return connected_deployment(gen, seed, *args, **kw)
        return gen(*args, seed=seed, **kw), 0


@dataclass(frozen=True)
class Scenario:
    protocol: str = "agem"
    topology: TopologySpec = field(default_factory=TopologySpec)
    seed: int = 1
    traffic: TrafficSpec = field(default_factory=TrafficSpec)
    link: LinkModel = field(default_factory=LinkModel)
    energy: EnergyConfig = field(default_factory=EnergyConfig)
    beacons: BeaconConfig = field(default_factory=BeaconConfig)
    compass: CompassConfig = field(default_factory=CompassConfig)
    routing: RoutingConfig = field(default_factory=RoutingConfig)
    trace: bool = False

    def __post_init__(self):
        if self.protocol not in PROTOCOLS:
            raise ValueError(f"protocol must be one of {PROTOCOLS}")

    def energy_params(self) -> EnergyModelParams:
        return EnergyModelParams(self.energy.e_elec, self.energy.eps_amp, self.traffic.packet_bits)

    def router(self):
        if self.protocol in ("agem", "geams"):
            return AgemRouter(self.energy_params(), self.compass, geams=self.protocol == "geams",
                              delegate_rule=self.routing.walkback_delegate)
        if self.protocol == "gpsr":
            return GpsrRouter(self.routing.planarization)
        return TpgfRouter(self.routing.tpgf_max_paths)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "Scenario":
        d = dict(d)
        sections = {"topology": TopologySpec, "traffic": TrafficSpec, "link": LinkModel,
                    "energy": EnergyConfig, "beacons": BeaconConfig,
                    "compass": CompassConfig, "routing": RoutingConfig}
        for key, sub in sections.items():
            if key in d:
                d[key] = _build(sub, d[key], key)
        return _build(cls, d, "scenario")


def simulate(scenario: Scenario, dep: Optional[Deployment] = None):
    """Run one scenario. Returns ``(RunResult, Deployment)``."""
    if dep is None:
        dep, _ = scenario.topology.build(scenario.seed)
    sim = Simulator(dep, scenario.router(), energy=scenario.energy_params(),
                    initial_energy=scenario.energy.initial_energy,
                    sink_powered=scenario.energy.sink_powered, link=scenario.link,
                    traffic=scenario.traffic, beacons=scenario.beacons,
                    max_hops=scenario.routing.max_hops, trace=scenario.trace)
    return sim.run(), dep


PLAN_KEYS = {"protocols", "topologies", "seeds"}


@dataclass
class ExperimentPlan:
    scenarios: List[Scenario]
    config: dict

    @classmethod
    def from_dict(cls, d: dict, seeds: Optional[Sequence[int]] = None) -> "ExperimentPlan":
        if not isinstance(d, dict):
            raise ConfigError("plan must be a JSON object")
        base = {k: v for k, v in d.items() if k not in PLAN_KEYS}
        protocols = d.get("protocols", list(PROTOCOLS))
        topologies = d.get("topologies", [{}])
        seeds = list(seeds) if seeds is not None else d.get("seeds", [1])
        if not protocols or not topologies or not seeds:
            raise ConfigError("protocols, topologies and seeds must be non-empty")
        if "protocol" in base or "topology" in base or "seed" in base:
            raise ConfigError("use the plural keys protocols/topologies/seeds in a plan")
        scenarios = []
        for topo, seed, proto in itertools.product(topologies, seeds, protocols):
            if not isinstance(seed, int):
                raise ConfigError(f"seed {seed!r} is not an integer")
            scenarios.append(Scenario.from_dict({**base, "protocol": proto,
                                                 "topology": topo, "seed": seed}))
        resolved = {"protocols": list(protocols),
                    "topologies": [dataclasses.asdict(_build(TopologySpec, t, "topology"))
                                   for t in topologies],
                    "seeds": seeds}
        first = scenarios[0].to_dict()
        for key in ("traffic", "link", "energy", "beacons", "compass", "routing", "trace"):
            resolved[key] = first[key]
        return cls(scenarios, resolved)

    @classmethod
    def load(cls, path, seeds=None) -> "ExperimentPlan":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(data, seeds)
