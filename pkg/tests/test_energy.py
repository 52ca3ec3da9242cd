import pytest
from hypothesis import given
from hypothesis import strategies as st

from wmsnroute.energy import (E_ELEC, EPS_AMP, EnergyModelParams, EnergyStore, debit,
                              neighbor_score, rx_energy, tx_energy)

P = EnergyModelParams()
bits = st.integers(0, 100_000)
meters = st.floats(0, 200, allow_nan=False)


def test_constants():
    assert E_ELEC == 5e-6
    assert EPS_AMP == 1e-9


def test_tx_examples():
    assert tx_energy(P, 0, 55.0) == 0
    assert tx_energy(P, 10_000, 80) == pytest.approx(10_000 * (5e-6 + 1e-9 * 6400), rel=1e-12)
    assert tx_energy(P, 10_000, 80) == pytest.approx(0.114, rel=1e-12)
    assert tx_energy(P, 1000, 0) == pytest.approx(0.005, rel=1e-12)


def test_rx_examples():
    assert rx_energy(P, 0) == 0
    assert rx_energy(P, 10_000) == pytest.approx(0.05, rel=1e-12)


@given(bits)
def test_rx_equals_tx_at_zero_distance(k):
    assert rx_energy(P, k) == tx_energy(P, k, 0.0)


@given(bits, bits, meters, meters)
def test_tx_monotone(k1, k2, d1, d2):
    k1, k2 = sorted((k1, k2))
    d1, d2 = sorted((d1, d2))
    assert tx_energy(P, k1, d1) <= tx_energy(P, k2, d1) <= tx_energy(P, k2, d2)


def test_negative_inputs_rejected():
    with pytest.raises(ValueError):
        tx_energy(P, -1, 10)
    with pytest.raises(ValueError):
        tx_energy(P, 10, -1)
    with pytest.raises(ValueError):
        rx_energy(P, -5)
    with pytest.raises(ValueError):
        neighbor_score(P, -1.0, 10)


def test_params_positive():
    with pytest.raises(ValueError):
        EnergyModelParams(e_elec=0)
    with pytest.raises(ValueError):
        EnergyModelParams(packet_bits=0)


def test_neighbor_score_examples():
    assert neighbor_score(P, 1.0, 50) == pytest.approx(0.9875, rel=1e-12)
    k = P.packet_bits
    assert neighbor_score(P, 0.0, 0.0) == pytest.approx(-2 * k * P.e_elec)
    assert neighbor_score(P, 1.0, 10) > neighbor_score(P, 1.0, 80)


@given(st.lists(st.floats(0, 10, allow_nan=False), min_size=2, max_size=8), meters)
def test_equal_distance_score_order_is_energy_order(energies, d):
    ordered = sorted(energies)
    scores = [neighbor_score(P, e, d) for e in ordered]
    assert scores == sorted(scores)


def test_debit_examples():
    s = EnergyStore.full(1.0)
    assert debit(s, 0).residual == 1.0
    assert debit(s, 0.114).residual == pytest.approx(0.886)
    low = EnergyStore(1.0, 0.05)
    dead = debit(low, 0.114)
    assert dead.residual == 0 and dead.dead
    assert not s.dead


def test_store_invariants():
    with pytest.raises(ValueError):
        EnergyStore(1.0, 1.5)
    with pytest.raises(ValueError):
        EnergyStore(1.0, -0.1)
    with pytest.raises(ValueError):
        debit(EnergyStore.full(1.0), -0.1)


@given(st.floats(0, 5), st.floats(0, 10))
def test_debit_never_negative(e0, amount):
    out = debit(EnergyStore.full(e0), amount)
    assert 0 <= out.residual <= e0
    assert out.dead == (out.residual == 0)
