import numpy as np
import pytest

from channel_sim import depuncture_llr, puncture, simulate_point
from codec import (
    DecoderSpec,
    FrozenSpec,
    boxplus_exact,
    boxplus_minsum,
    ca_scl_decode,
    decode,
    sc_decode,
    scl_decode,
)
from crc import CrcCode
from errors import RangeError, ShapeError
from polar_core import polar_encode
from puncturing import qup_table, rqup_table
from reliability import construct


def _noiseless_llr(x, scale=20.0):
    return scale * (1.0 - 2.0 * x.astype(np.float64))


def _random_block(frozen, rng):
    info = rng.integers(0, 2, size=frozen.K, dtype=np.uint8)
    u = frozen.place(info)
    return info, u, polar_encode(u)


def test_boxplus_rules():
    assert boxplus_minsum(np.array(2.0), np.array(-3.0)) == -2.0
    exact = boxplus_exact(np.array(2.0), np.array(-3.0))
    assert exact == pytest.approx(2 * np.arctanh(np.tanh(1.0) * np.tanh(-1.5)))
    assert boxplus_exact(np.array(1e9), np.array(1e9)) == pytest.approx(1e9)
    assert boxplus_exact(np.array(0.0), np.array(7.0)) == 0.0


def test_frozen_spec_validation():
    with pytest.raises(RangeError):
        FrozenSpec(8, (0, 3))
    with pytest.raises(RangeError):
        FrozenSpec(8, (2, 2))
    with pytest.raises(ShapeError):
        FrozenSpec(8, (1,), values=(0, 1))
    spec = FrozenSpec(4, (2, 4), values=(1, 1, 0, 1))
    assert spec.frozen_values().tolist() == [1, 0, 0, 0]
    assert spec.place([1, 1]).tolist() == [1, 1, 0, 1]
    with pytest.raises(ShapeError):
        spec.place([1, 0, 1])


def test_sc_noiseless_roundtrip():
    cfg = construct(qup_table(64, 0), 32, "bound", 2.0)
    frozen = cfg.frozen_spec()
    rng = np.random.default_rng(21)
    for _ in range(200):
        info, u, x = _random_block(frozen, rng)
        result = sc_decode(_noiseless_llr(x), frozen)
        assert np.array_equal(result.u, u)
        assert np.array_equal(result.info_bits, info)


@pytest.mark.slow
def test_sc_noiseless_roundtrip_at_1024():
    cfg = construct(qup_table(1024, 0), 512, "bound", 2.0)
    frozen = cfg.frozen_spec()
    rng = np.random.default_rng(22)
    for _ in range(1000):
        info, _, x = _random_block(frozen, rng)
        assert np.array_equal(sc_decode(_noiseless_llr(x), frozen).info_bits, info)


def test_all_frozen_returns_frozen_values():
    values = (1, 0, 1, 1, 0, 0, 1, 0)
    frozen = FrozenSpec(8, (), values=values)
    llr = np.random.default_rng(1).normal(size=8)
    result = sc_decode(llr, frozen)
    assert result.u.tolist() == list(values)
    assert result.info_bits.size == 0


def test_sc_c0_punctured_noiseless():
    cfg = construct(qup_table(64, 20), 22, "bound", 2.0)
    frozen = cfg.frozen_spec()
    rng = np.random.default_rng(8)
    for _ in range(50):
        info, u, x = _random_block(frozen, rng)
        llr = depuncture_llr(_noiseless_llr(puncture(x, cfg.table)), cfg.table)
        result = sc_decode(llr, frozen)
        assert np.array_equal(result.info_bits, info)
        # removed source positions stay frozen at zero
        assert not result.u[np.asarray(cfg.punctured_source) - 1].any()


def test_sc_c1_shortened_noiseless():
    cfg = construct(rqup_table(64, 20), 22, "bound", 2.0)
    frozen = cfg.frozen_spec()
    rng = np.random.default_rng(9)
    for _ in range(50):
        info, _, x = _random_block(frozen, rng)
        # shortened positions carry known zeros
        assert not x[cfg.table.as_array() == 0].any()
        llr = depuncture_llr(_noiseless_llr(puncture(x, cfg.table)), cfg.table)
        assert np.array_equal(sc_decode(llr, frozen).info_bits, info)


def test_scl_with_one_path_matches_sc():
    cfg = construct(qup_table(64, 12), 26, "bound", 1.0)
    frozen = cfg.frozen_spec()
    rng = np.random.default_rng(4)
    for _ in range(100):
        llr = depuncture_llr(rng.normal(1.0, 2.0, size=cfg.M), cfg.table)
        sc = sc_decode(llr, frozen)
        (scl,) = scl_decode(llr, frozen, 1)
        assert np.array_equal(sc.u, scl.u)


def test_scl_noiseless_best_candidate_is_correct():
    cfg = construct(qup_table(64, 0), 32, "bound", 2.0)
    frozen = cfg.frozen_spec()
    info, u, x = _random_block(frozen, np.random.default_rng(2))
    candidates = scl_decode(_noiseless_llr(x), frozen, 32)
    assert len(candidates) == 32
    assert np.array_equal(candidates[0].u, u)
    metrics = [c.metric for c in candidates]
    assert metrics == sorted(metrics)
    with pytest.raises(RangeError):
        scl_decode(_noiseless_llr(x), frozen, 0)


def test_scl_path_metrics_never_decrease():
    cfg = construct(qup_table(64, 12), 26, "ga", 1.0)
    frozen = cfg.frozen_spec()
    rng = np.random.default_rng(17)
    for _ in range(20):
        llr = depuncture_llr(rng.normal(1.0, 2.0, size=cfg.M), cfg.table)
        steps = []
        scl_decode(llr, frozen, 8, on_leaf=lambda leaf, metrics, origin: steps.append((leaf, metrics, origin)))
        assert [leaf for leaf, _, _ in steps] == list(range(64))
        previous = np.zeros(1)
        for _, metrics, origin in steps:
            assert np.all(metrics >= previous[origin])
            previous = metrics


def test_ca_scl_noiseless_passes_crc():
    crc = CrcCode(0x07, 8)
    cfg = construct(qup_table(64, 0), 32, "bound", 2.0)
    frozen = cfg.frozen_spec()
    rng = np.random.default_rng(6)
    info = crc.attach(rng.integers(0, 2, size=crc.payload_length(32), dtype=np.uint8))
    x = polar_encode(frozen.place(info))
    result = ca_scl_decode(_noiseless_llr(x), frozen, 8, crc)
    assert result.crc_ok is True
    assert np.array_equal(result.info_bits, info)


def test_ca_scl_flags_garbage():
    cfg = construct(qup_table(64, 0), 40, "bound", 2.0)
    llr = np.random.default_rng(13).normal(0.0, 0.1, size=64)
    result = ca_scl_decode(llr, cfg.frozen_spec(), 4, CrcCode())
    assert result.crc_ok is False


def test_decoder_spec():
    assert DecoderSpec().label == "sc"
    assert DecoderSpec("scl", 8).label == "scl8"
    with pytest.raises(RangeError):
        DecoderSpec("bp")
    with pytest.raises(RangeError):
        DecoderSpec("scl", 0)
    with pytest.raises(RangeError):
        DecoderSpec("ca-scl", 4)
    with pytest.raises(RangeError):
        DecoderSpec("sc", check_node="offset")


@pytest.mark.parametrize(
    "spec",
    [DecoderSpec(), DecoderSpec("scl", 4), DecoderSpec("ca-scl", 4, CrcCode(0x07, 8)), DecoderSpec(check_node="minsum")],
)
def test_decode_dispatch_noiseless(spec):
    cfg = construct(qup_table(32, 0), 16, "bound", 2.0)
    frozen = cfg.frozen_spec()
    rng = np.random.default_rng(30)
    info = rng.integers(0, 2, size=16, dtype=np.uint8)
    if spec.crc is not None:
        info = spec.crc.attach(info[: spec.crc.payload_length(16)])
    x = polar_encode(frozen.place(info))
    assert np.array_equal(decode(spec, _noiseless_llr(x), frozen).info_bits, info)


def test_llr_shape_is_checked():
    with pytest.raises(ShapeError):
        sc_decode([0.0] * 7, FrozenSpec(8, (1,)))


@pytest.mark.slow
@pytest.mark.parametrize("ebn0", [1.0, 1.5, 2.0])
def test_list_decoding_never_loses_to_sc(ebn0):
    cfg = construct(qup_table(1024, 324), 350, "ga", ebn0, scheme="qup")
    budget = {"max_trials": 1000, "max_errors": 1000, "seed": 5}
    sc = simulate_point(cfg, DecoderSpec(), ebn0, **budget)
    scl1 = simulate_point(cfg, DecoderSpec("scl", 1), ebn0, **budget)
    scl8 = simulate_point(cfg, DecoderSpec("scl", 8), ebn0, **budget)
    ca_scl = simulate_point(cfg, DecoderSpec("ca-scl", 32, CrcCode()), ebn0, **budget)
    assert scl1.errors == sc.errors
    assert scl8.bler <= sc.bler
    assert ca_scl.bler <= sc.bler
