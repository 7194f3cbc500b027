import math

import pytest
from hypothesis import given, strategies as st

from photonlink.radiometry import (
    LinkBudget,
    SlotStatistics,
    dbm_to_watts,
    slot_statistics,
    watts_to_dbm,
)


def test_dbm_definition():
    assert dbm_to_watts(0.0) == pytest.approx(1e-3, rel=1e-15)
    assert dbm_to_watts(30.0) == pytest.approx(1.0, rel=1e-15)
    assert dbm_to_watts(-152.0) == pytest.approx(6.3096e-19, abs=1e-22)


@pytest.mark.parametrize(
    "power, freq, temp, sig, bg",
    [
        (-152.0, 5e9, 300.0, 190.4, 1250.2),
        (-156.0, 3.8e9, 0.05, 99.8, 0.274),
    ],
)
def test_slot_statistics_reference_points(power, freq, temp, sig, bg):
    s = slot_statistics(LinkBudget(power, freq, 1e-3, temp, 0.9))
    assert s.lambda_sig == pytest.approx(sig, rel=1e-3)
    assert s.lambda_bg == pytest.approx(bg, rel=1e-3)
    assert s.capture_prob == 0.9


def test_zero_temperature_has_no_background():
    assert slot_statistics(LinkBudget(-150.0, 5e9, 1e-3, 0.0)).lambda_bg == 0.0


def test_thinned_means():
    s = SlotStatistics(4.0, 1.0, 0.5)
    assert s.mean_on == 2.5
    assert s.mean_off == 0.5


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(carrier_freq=0.0),
        dict(carrier_freq=-1.0),
        dict(slot_duration=0.0),
        dict(antenna_temp=-1.0),
        dict(capture_prob=1.5),
        dict(power_dbm=math.inf),
    ],
)
def test_invalid_budgets_rejected(kwargs):
    base = dict(power_dbm=-150.0, carrier_freq=5e9, slot_duration=1e-3, antenna_temp=300.0)
    base.update(kwargs)
    with pytest.raises(ValueError):
        LinkBudget(**base)


@given(st.floats(-200, 60))
def test_dbm_round_trip(p):
    assert watts_to_dbm(dbm_to_watts(p)) == pytest.approx(p, rel=1e-12, abs=1e-12)


@given(st.floats(0.01, 1000.0))
def test_background_linear_in_temperature(t):
    one = slot_statistics(LinkBudget(-150.0, 5e9, 1e-3, t)).lambda_bg
    two = slot_statistics(LinkBudget(-150.0, 5e9, 1e-3, 2 * t)).lambda_bg
    assert two == pytest.approx(2 * one, rel=1e-12)


def test_signal_monotonicity():
    base = slot_statistics(LinkBudget(-150.0, 5e9, 1e-3, 1.0)).lambda_sig
    assert slot_statistics(LinkBudget(-149.0, 5e9, 1e-3, 1.0)).lambda_sig > base
    assert slot_statistics(LinkBudget(-150.0, 5e9, 2e-3, 1.0)).lambda_sig > base
    assert slot_statistics(LinkBudget(-150.0, 6e9, 1e-3, 1.0)).lambda_sig < base
