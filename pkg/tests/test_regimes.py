"""Physical regimes around the operating point (companions to the acceptance suite)."""
import math

import numpy as np
import pytest

import oracles
from phaseqrng import reference_scenario
from phaseqrng.analysis import autocorrelation, knee_frequency, psd_estimate
from phaseqrng.pipeline import run_pipeline, simulate_trace


def _analog_spectrum(delay):
    tr = simulate_trace(reference_scenario(**{"mzi.delay": delay}), 1 << 21, include_scope=False)
    return psd_estimate(tr, 2048)


@pytest.mark.parametrize("delay", [250e-12, 650e-12])
def test_knee_is_boxcar_half_power_point(delay):
    # the phase difference integrates frequency noise over T_d: a sinc^2 response
    sp = _analog_spectrum(delay)
    knee = knee_frequency(sp, (0, 0.05 / delay))
    assert knee * delay == pytest.approx(oracles.sinc2_half_power(), rel=0.06)


def test_analog_low_frequency_level_scales_with_delay_squared():
    lo = {d: _analog_spectrum(d).band_level(0, 50e6) for d in (250e-12, 650e-12)}
    ratio = lo[650e-12] - lo[250e-12]
    assert ratio == pytest.approx(20 * math.log10(2.6), abs=1.0)


def test_sampled_level_scales_with_variance():
    cfg = reference_scenario(**{"sampling.frame_length": 200_000})
    lv = {}
    for d in (250e-12, 650e-12):
        r = run_pipeline(cfg.replace(**{"mzi.delay": d}))
        lv[d] = psd_estimate(r.first_frame, 1024).band_level(0, 50e6)
    # decorrelated samples: level tracks Var[sin(dtheta)], slightly raised by detector smoothing
    expected = 10 * math.log10(oracles.sin_variance(0.13) / oracles.sin_variance(0.05))
    assert lv[650e-12] - lv[250e-12] == pytest.approx(expected, abs=1.0)


def test_overlapping_windows_correlate_and_xor_suppresses():
    # T_S < T_d: consecutive samples share phase-noise history
    cfg = reference_scenario(**{"sampling.period": 500e-12, "sampling.frame_length": 200_000})
    r = run_pipeline(cfg)
    raw = autocorrelation(r.bin1, 20)
    other = autocorrelation(r.bin2, 20)
    xor = autocorrelation(r.bin3, 20)
    n = r.bin1.length
    assert raw[0] > 5 / math.sqrt(n)
    assert np.abs(xor).max() < np.abs(raw).max()
    # XOR of independent streams is the product of +/-1 values: correlations multiply
    np.testing.assert_allclose(xor[:3], raw[:3] * other[:3], atol=5 / math.sqrt(n))


def test_decorrelated_regime_has_no_lag_one_structure():
    r = run_pipeline(reference_scenario(**{"sampling.frame_length": 400_000}))
    assert abs(autocorrelation(r.bin1, 1)[0]) < 5 / math.sqrt(r.bin1.length)
