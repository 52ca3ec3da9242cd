"""Geographic multipath routing for wireless multimedia sensor networks.

AGEM (adaptive-compass, energy-aware online multipath), its GEAMS variant,
and the GPSR / TPGF baselines on a deterministic discrete-event simulator.
"""
from .agem import AgemRouter, CompassConfig
from .baselines import GpsrRouter, TpgfRouter, planarize, tpgf_multipath
from .energy import EnergyModelParams, neighbor_score, rx_energy, tx_energy
from .metrics import check_integrity, compute_metrics
from .scenario import ExperimentPlan, Scenario, simulate
from .simcore import BeaconConfig, LinkModel, Simulator, TrafficSpec
from .topology import Deployment, gen_grid, gen_holes, gen_plain

__version__ = "0.1.0"
