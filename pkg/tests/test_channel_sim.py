import math

import numpy as np
import pytest

import config
from channel_sim import (
    BLER_COLUMNS,
    ChannelParams,
    depuncture_llr,
    puncture,
    run_bler,
    sigma_from_ebn0,
    simulate_point,
    transmit,
    wilson_interval,
)
from codec import DecoderSpec
from errors import RangeError, ShapeError
from puncturing import qup_table, rqup_table
from reliability import construct


@pytest.mark.parametrize("ebn0,rate", [(0.0, 0.5), (2.5, 1 / 3), (-1.0, 0.75)])
def test_sigma_matches_ebn0(ebn0, rate):
    sigma = ChannelParams(ebn0, rate).sigma
    assert sigma**2 * 2.0 * rate * 10 ** (ebn0 / 10) == pytest.approx(1.0, abs=1e-12)
    assert sigma == sigma_from_ebn0(ebn0, rate)
    with pytest.raises(RangeError):
        sigma_from_ebn0(ebn0, 0.0)


def test_transmit_signs_at_low_noise():
    x = np.array([0, 1, 1, 0, 1], dtype=np.uint8)
    llr = transmit(x, 1e-3, np.random.default_rng(0))
    assert np.array_equal(np.sign(llr), 1 - 2 * x.astype(int))
    with pytest.raises(RangeError):
        transmit(x, 0.0, np.random.default_rng(0))


def test_llr_mean_for_zero_codeword():
    sigma = 0.8
    samples = 100_000
    llr = transmit(np.zeros(samples, dtype=np.uint8), sigma, np.random.default_rng(17))
    standard_error = (2.0 / sigma) / math.sqrt(samples)
    assert abs(llr.mean() - 2.0 / sigma**2) < 4 * standard_error


def test_puncture_keeps_table_order():
    t = qup_table(8, 3)
    assert puncture(np.arange(8), t).tolist() == [1, 3, 5, 6, 7]
    with pytest.raises(ShapeError):
        puncture(np.arange(4), t)


def test_depuncture_fills_by_mode():
    received = [1.0, 2.0, 3.0, 4.0, 5.0]
    c0 = depuncture_llr(received, qup_table(8, 3))
    assert c0.tolist() == [0.0, 1.0, 0.0, 2.0, 0.0, 3.0, 4.0, 5.0]
    s = config.LLR_SATURATION
    c1 = depuncture_llr(received, rqup_table(8, 3))
    assert c1.tolist() == [1.0, 2.0, 3.0, s, 4.0, s, 5.0, s]
    with pytest.raises(ShapeError):
        depuncture_llr(received[:4], qup_table(8, 3))


def test_wilson_interval():
    low, high = wilson_interval(0, 100)
    assert low == 0.0
    assert 0.0 < high < 0.05
    low, high = wilson_interval(100, 100)
    assert high == 1.0
    assert 0.95 < low < 1.0
    low, high = wilson_interval(50, 100)
    assert (low + high) / 2 == pytest.approx(0.5)
    assert low < 0.5 < high
    assert wilson_interval(0, 0) == (0.0, 1.0)
    with pytest.raises(RangeError):
        wilson_interval(5, 4)


def test_high_snr_sc_has_no_errors():
    cfg = construct(qup_table(64, 16), 24, "bound", 2.0, scheme="qup")
    record = simulate_point(cfg, DecoderSpec(), 40.0, max_trials=200, max_errors=10)
    assert (record.trials, record.errors, record.bler) == (200, 0, 0.0)
    assert record.scheme == "qup"
    assert record.mode == "C0"
    assert set(record.as_row()) == set(BLER_COLUMNS)


def test_simulation_is_reproducible_from_the_seed():
    cfg = construct(rqup_table(64, 16), 24, "bound", 1.0, scheme="rqup")
    first = run_bler(cfg, DecoderSpec(), [0.0, 1.0], max_trials=40, max_errors=40, seed=99)
    second = run_bler(cfg, DecoderSpec(), [0.0, 1.0], max_trials=40, max_errors=40, seed=99)
    assert first == second
    assert [r.point_index for r in first] == [0, 1]
    assert all(0.0 <= r.bler <= 1.0 and r.errors <= r.trials for r in first)


def test_simulation_stops_at_the_error_budget():
    cfg = construct(qup_table(64, 16), 24, "bound", 0.0)
    record = simulate_point(cfg, DecoderSpec(), -5.0, max_trials=1000, max_errors=5)
    assert record.errors == 5
    assert record.trials < 1000
    with pytest.raises(RangeError):
        simulate_point(cfg, DecoderSpec(), 0.0, max_trials=0)


def _rate_matched_bler(builder, K, ebn0):
    cfg = construct(builder(1024, 324), K, "ga", ebn0)
    return simulate_point(cfg, DecoderSpec(), ebn0, max_trials=30_000, max_errors=100, seed=7)


def _interval(record):
    return wilson_interval(record.errors, record.trials)


@pytest.mark.slow
def test_low_rate_favours_qup():
    qup = _rate_matched_bler(qup_table, 233, 2.0)
    rqup = _rate_matched_bler(rqup_table, 233, 2.0)
    assert _interval(qup)[1] < _interval(rqup)[0]


@pytest.mark.slow
def test_half_rate_schemes_are_close():
    qup_low, qup_high = _interval(_rate_matched_bler(qup_table, 350, 2.0))
    rqup_low, rqup_high = _interval(_rate_matched_bler(rqup_table, 350, 2.0))
    assert qup_low <= rqup_high and rqup_low <= qup_high


@pytest.mark.slow
def test_high_rate_favours_rqup():
    qup = _rate_matched_bler(qup_table, 525, 4.0)
    rqup = _rate_matched_bler(rqup_table, 525, 4.0)
    assert _interval(rqup)[1] < _interval(qup)[0]
