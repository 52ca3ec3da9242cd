"""First-order radio energy model and the neighbor objective function."""
from __future__ import annotations

from dataclasses import dataclass, replace

E_ELEC = 5e-6     # J/bit, transceiver electronics
EPS_AMP = 1e-9    # J/bit/m^2, transmit amplifier


@dataclass(frozen=True)
class EnergyModelParams:
    e_elec: float = E_ELEC
    eps_amp: float = EPS_AMP
    packet_bits: int = 1000

    def __post_init__(self):
        if self.e_elec <= 0 or self.eps_amp <= 0 or self.packet_bits <= 0:
            raise ValueError("energy model parameters must be strictly positive")


@dataclass(frozen=True)
class EnergyStore:
    initial: float
    residual: float

    def __post_init__(self):
        if not 0 <= self.residual <= self.initial:
            raise ValueError(f"residual {self.residual} outside [0, {self.initial}]")

    @classmethod
    def full(cls, joules: float) -> "EnergyStore":
        return cls(joules, joules)

    @property
    def dead(self) -> bool:
        return self.residual <= 0.0


def tx_energy(params: EnergyModelParams, k: float, d: float) -> float:
    """Energy to transmit ``k`` bits over ``d`` meters: k * (E_elec + eps_amp * d^2)."""
    if k < 0 or d < 0:
        raise ValueError("bits and distance must be non-negative")
    return k * (params.e_elec + params.eps_amp * d * d)


def rx_energy(params: EnergyModelParams, k: float) -> float:
    if k < 0:
        raise ValueError("bits must be non-negative")
    return k * params.e_elec


def neighbor_score(params: EnergyModelParams, neighbor_energy: float,
                   neighbor_distance: float) -> float:
    """Residual energy a neighbor would keep after relaying one data packet.

    Negative when the neighbor cannot afford the packet.
    """
    if neighbor_energy < 0 or neighbor_distance < 0:
        raise ValueError("neighbor energy and distance must be non-negative")
    k = params.packet_bits
    return (neighbor_energy
            - tx_energy(params, k, neighbor_distance)
            - rx_energy(params, k))


def debit(store: EnergyStore, amount: float) -> EnergyStore:
    """Subtract ``amount`` joules, clamping at zero."""
    if amount < 0:
        raise ValueError("cannot debit a negative amount")
    return replace(store, residual=max(0.0, store.residual - amount))
