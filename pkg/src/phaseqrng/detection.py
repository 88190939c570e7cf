"""Photodetection channels, electrical noise and fixed-interval sampling."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError
from .interferometer import SignalTrace
from .seeding import STREAM_NOISE, child, hashed_normals


@dataclass(frozen=True)
class DetectorConfig:
    """One detection stage: first-order low-pass, gain, additive noise.

    ``spectral_spikes`` holds ``(frequency_hz, amplitude, phase_rad)`` tones
    modelling pickup lines.  ``white_noise_std`` is per simulation step.
    """

    bandwidth: float
    gain: float = 1.0
    white_noise_std: float = 0.0
    spectral_spikes: tuple = ()

    def __post_init__(self):
        if not (self.bandwidth > 0 and math.isfinite(self.bandwidth)):
            raise InvalidParameterError(f"bandwidth must be positive, got {self.bandwidth!r}")
        if not self.white_noise_std >= 0:
            raise InvalidParameterError(f"white_noise_std must be >= 0, got {self.white_noise_std!r}")
        spikes = tuple(tuple(float(v) for v in s) for s in self.spectral_spikes)
        for s in spikes:
            if len(s) != 3:
                raise InvalidParameterError(f"spike {s!r} must be (frequency, amplitude, phase)")
            if not (s[0] > 0 and s[1] >= 0):
                raise InvalidParameterError(f"spike {s!r} needs positive frequency and amplitude >= 0")
        object.__setattr__(self, "spectral_spikes", spikes)

    @property
    def response_time(self) -> float:
        return 1.0 / self.bandwidth

    @property
    def noiseless(self) -> bool:
        return self.white_noise_std == 0 and not any(a for _, a, _ in self.spectral_spikes)


# Pickup-line placeholders; the measured frequencies were never published.
DEFAULT_SPIKES = ((47e6, 0.004, 0.0), (133e6, 0.003, 1.0), (311e6, 0.002, 2.0))
FAST_DETECTOR = DetectorConfig(5e9, white_noise_std=0.02, spectral_spikes=DEFAULT_SPIKES)
SCOPE_BANDWIDTH = 3e9
MONITOR_DETECTOR = DetectorConfig(1e6)
MONITOR_SAMPLING_PERIOD = 0.5e-6


@dataclass
class SampleSeries:
    sampling_period: float
    values: np.ndarray
    threshold: float | None = None
    sample_offset: float = 0.0
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if not self.sampling_period > 0:
            raise InvalidParameterError(f"sampling_period must be positive, got {self.sampling_period!r}")
        if self.values.ndim != 1 or self.values.size < 1:
            raise InvalidParameterError("a sample series needs at least one value")

    def __len__(self) -> int:
        return self.values.size

    @property
    def sampling_rate(self) -> float:
        return 1.0 / self.sampling_period


class FirstOrderLowpass:
    """Causal first-order low-pass, bilinear transform with pre-warping.

    The -3 dB point lands exactly on ``bandwidth`` and the DC gain is exactly
    ``gain``.  State carries over between :meth:`process` calls, so feeding a
    signal in pieces gives the same output as feeding it whole.
    """

    def __init__(self, bandwidth: float, time_step: float, gain: float = 1.0):
        if not time_step <= 0.5 / bandwidth:
            raise InvalidParameterError(
                f"time step {time_step:.3g} s does not resolve a {bandwidth:.3g} Hz detector: "
                f"need time_step <= T_R/2 = {0.5 / bandwidth:.3g} s")
        k = math.tan(math.pi * bandwidth * time_step)
        self.b0 = k / (1.0 + k)
        self.a1 = (k - 1.0) / (1.0 + k)
        self.gain = float(gain)
        self._x_prev: float | None = None
        self._y_prev = 0.0

    @property
    def coefficients(self) -> tuple[np.ndarray, np.ndarray]:
        """``(b, a)`` in scipy.signal convention, gain included."""
        return (np.array([self.b0, self.b0]) * self.gain, np.array([1.0, self.a1]))

    def process(self, x: np.ndarray) -> np.ndarray:
        from scipy.signal import lfilter

        x = np.asarray(x, dtype=np.float64)
        if x.size == 0:
            return x.copy()
        if self._x_prev is None:
            # start in steady state for the first input value
            self._x_prev, self._y_prev = float(x[0]), float(x[0])
        b = np.array([self.b0, self.b0])
        a = np.array([1.0, self.a1])
        zi = np.array([self.b0 * self._x_prev - self.a1 * self._y_prev])
        y, _ = lfilter(b, a, x, zi=zi)
        self._x_prev = float(x[-1])
        self._y_prev = float(y[-1])
        if self.gain != 1.0:
            return y * self.gain
        return y

    def frequency_response(self, frequencies: np.ndarray, time_step: float) -> np.ndarray:
        z = np.exp(-2j * math.pi * np.asarray(frequencies) * time_step)
        return self.gain * self.b0 * (1 + z) / (1 + self.a1 * z)


def lowpass_filter(trace: SignalTrace, cfg: DetectorConfig) -> SignalTrace:
    filt = FirstOrderLowpass(cfg.bandwidth, trace.time_step, cfg.gain)
    return trace.replace(filt.process(trace.values), "detector-filtered", detector_bandwidth=cfg.bandwidth)


def electrical_noise(cfg: DetectorConfig, seed, steps: np.ndarray, time_step: float) -> np.ndarray:
    """Noise at absolute step indices; white part is counter-addressed by step."""
    steps = np.asarray(steps)
    out = np.zeros(steps.shape)
    if cfg.white_noise_std:
        out += cfg.white_noise_std * hashed_normals(child(seed, STREAM_NOISE), steps)
    if cfg.spectral_spikes:
        t = steps * time_step
        for freq, amp, phase in cfg.spectral_spikes:
            out += amp * np.sin(2 * math.pi * freq * t + phase)
    return out


def add_electrical_noise(trace: SignalTrace, cfg: DetectorConfig, seed) -> SignalTrace:
    """Add white Gaussian noise and pickup tones to a trace."""
    if cfg.noiseless:
        return trace.replace(trace.values.copy(), "detector-noisy")
    steps = trace.start_index + np.arange(trace.values.size)
    return trace.replace(trace.values + electrical_noise(cfg, seed, steps, trace.time_step),
                         "detector-noisy")


def sample_count(span: float, sampling_period: float, offset: float) -> int:
    # tolerate float error in span / period ratios such as 1e-3 / 1e-9
    return int(math.floor((span - offset) / sampling_period * (1 + 1e-12) + 1e-9)) + 1


def sample_steps(count: int, sampling_period: float, offset: float, time_step: float) -> np.ndarray:
    """Nearest simulation step for each sampling instant ``offset + i*T_S``."""
    return np.rint((offset + np.arange(count) * sampling_period) / time_step).astype(np.int64)


def sample(trace: SignalTrace, sampling_period: float, offset: float = 0.0) -> SampleSeries:
    """Nearest-neighbour samples at ``offset + i * sampling_period`` (relative to trace start)."""
    if not sampling_period >= trace.time_step * (1 - 1e-9):
        raise InvalidParameterError(
            f"sampling period {sampling_period!r} s is shorter than the trace step {trace.time_step!r} s")
    if not 0 <= offset < sampling_period:
        raise InvalidParameterError(f"offset must lie in [0, sampling_period), got {offset!r}")
    if offset > trace.span:
        raise InvalidParameterError("sampling offset lies beyond the end of the trace: no samples")
    count = sample_count(trace.span, sampling_period, offset)
    idx = sample_steps(count, sampling_period, offset, trace.time_step)
    idx = idx[idx < trace.values.size]
    return SampleSeries(sampling_period, trace.values[idx], None, offset,
                        {"source": trace.origin, "time_step": trace.time_step})


def monitor_channel(trace: SignalTrace, cfg: DetectorConfig = MONITOR_DETECTOR,
                    sampling_period: float = MONITOR_SAMPLING_PERIOD) -> SampleSeries:
    """Slow phase-monitor channel: 1 MHz low-pass, then sampled at 2 MHz."""
    if sampling_period > 0.5 / cfg.bandwidth:
        raise InvalidParameterError("monitor must be sampled at >= twice its bandwidth")
    series = sample(lowpass_filter(trace, cfg), sampling_period)
    series.metadata["channel"] = "monitor"
    return series


def quantize(series: SampleSeries, bits: int = 8, full_scale: tuple[float, float] | None = None) -> SampleSeries:
    """Uniform mid-rise ADC; values are replaced by their code's centre level."""
    lo, hi = full_scale if full_scale is not None else (series.values.min(), series.values.max())
    if not hi > lo:
        return SampleSeries(series.sampling_period, series.values.copy(), series.threshold,
                            series.sample_offset, dict(series.metadata))
    levels = 1 << bits
    lsb = (hi - lo) / levels
    codes = np.clip(np.floor((series.values - lo) / lsb), 0, levels - 1)
    return SampleSeries(series.sampling_period, lo + (codes + 0.5) * lsb, series.threshold,
                        series.sample_offset, {**series.metadata, "adc_bits": bits})
