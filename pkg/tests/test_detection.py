import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from phaseqrng.detection import (
    FAST_DETECTOR, DetectorConfig, FirstOrderLowpass, SampleSeries, add_electrical_noise, electrical_noise,
    lowpass_filter, monitor_channel, quantize, sample,
)
from phaseqrng.errors import InvalidParameterError
from phaseqrng.interferometer import SignalTrace


def test_lowpass_matches_direct_recurrence():
    rng = np.random.default_rng(0)
    x = rng.normal(size=500)
    y = FirstOrderLowpass(5e9, 50e-12).process(x)
    np.testing.assert_allclose(y, oracles.lowpass_direct(x, 5e9, 50e-12), atol=1e-12)


@given(st.integers(1, 999))
def test_lowpass_chunking_is_invisible(cut):
    x = np.random.default_rng(1).normal(size=1000)
    whole = FirstOrderLowpass(3e9, 50e-12, gain=2.0).process(x)
    f = FirstOrderLowpass(3e9, 50e-12, gain=2.0)
    parts = np.concatenate([f.process(x[:cut]), f.process(x[cut:])])
    np.testing.assert_allclose(parts, whole, atol=1e-12)


def test_lowpass_corner_and_dc_gain():
    f = FirstOrderLowpass(1e9, 1e-11, gain=3.0)
    h = f.frequency_response(np.array([0.0, 1e9]), 1e-11)
    assert abs(h[0]) == pytest.approx(3.0)
    assert 20 * np.log10(abs(h[1]) / 3.0) == pytest.approx(-3.0103, abs=1e-3)
    # steady-state start: a constant input passes unchanged
    np.testing.assert_allclose(f.process(np.full(10, 0.7)), 2.1)


def test_lowpass_rejects_coarse_step():
    with pytest.raises(InvalidParameterError):
        FirstOrderLowpass(5e9, 150e-12)


def test_lowpass_filter_trace():
    tr = SignalTrace(1e-11, np.ones(5))
    out = lowpass_filter(tr, DetectorConfig(1e9, gain=2.0))
    assert out.origin == "detector-filtered"
    np.testing.assert_allclose(out.values, 2.0)


@pytest.mark.parametrize("kwargs", [{"bandwidth": 0.0}, {"bandwidth": 1e9, "white_noise_std": -1.0},
                                    {"bandwidth": 1e9, "spectral_spikes": ((1e6, 1.0),)}])
def test_detector_validation(kwargs):
    with pytest.raises(InvalidParameterError):
        DetectorConfig(**kwargs)


def test_electrical_noise_components():
    cfg = DetectorConfig(5e9, white_noise_std=0.1)
    n = electrical_noise(cfg, 0, np.arange(100_000), 5e-11)
    assert n.std() == pytest.approx(0.1, rel=0.02)
    tone = DetectorConfig(5e9, spectral_spikes=((1e8, 0.5, 0.0),))
    t = np.arange(200) * 5e-11
    np.testing.assert_allclose(electrical_noise(tone, 0, np.arange(200), 5e-11), 0.5 * np.sin(2 * np.pi * 1e8 * t))
    assert FAST_DETECTOR.noiseless is False and DetectorConfig(1e9).noiseless


def test_add_noise_uses_absolute_steps():
    cfg = DetectorConfig(5e9, white_noise_std=1.0)
    full = add_electrical_noise(SignalTrace(1e-11, np.zeros(100), "detector-filtered"), cfg, 3)
    tail = add_electrical_noise(SignalTrace(1e-11, np.zeros(40), "detector-filtered", start_index=60), cfg, 3)
    np.testing.assert_array_equal(full.values[60:], tail.values)
    assert full.origin == "detector-noisy"


def test_sampling_nearest_neighbour():
    tr = SignalTrace(50e-12, np.arange(201.0))
    s = sample(tr, 1e-9, offset=0.1e-9)
    assert len(s) == 10
    np.testing.assert_array_equal(s.values, 2 + 20 * np.arange(10))
    assert s.sampling_rate == pytest.approx(1e9)


@pytest.mark.parametrize("period,offset", [(1e-12, 0.0), (1e-9, 1e-9), (1e-9, -1e-12)])
def test_sampling_rejects(period, offset):
    with pytest.raises(InvalidParameterError):
        sample(SignalTrace(50e-12, np.zeros(100)), period, offset)


def test_monitor_channel_suppresses_fast_fluctuations():
    rng = np.random.default_rng(2)
    dt = 1e-9
    x = 0.3 * rng.normal(size=40_000)
    mon = monitor_channel(SignalTrace(dt, x))
    assert mon.sampling_period == 0.5e-6
    # white noise through a one-pole low-pass keeps sqrt(pi * fc * dt) of its std
    assert mon.values.std() / x.std() == pytest.approx(np.sqrt(np.pi * 1e6 * dt), rel=0.15)
    assert mon.metadata["channel"] == "monitor"


def test_quantize():
    s = SampleSeries(1.0, np.linspace(0, 1, 1000))
    q = quantize(s, bits=3)
    assert np.unique(q.values).size == 8
    assert np.max(np.abs(q.values - s.values)) <= 1 / 16 + 1e-12
