"""Averaged-periodogram power spectral density."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal

from ..detection import SampleSeries
from ..errors import InvalidParameterError
from ..interferometer import SignalTrace

WINDOWS = {"rectangular": "boxcar", "hann": "hann"}


@dataclass
class SpectrumEstimate:
    """One-sided PSD in dB relative to ``reference`` (signal units**2 / Hz).

    The DC bin is dropped; the mean is removed before estimation anyway.
    """

    frequencies: np.ndarray
    power_density: np.ndarray
    segment_length: int
    window: str
    averages: int
    reference: float = 1.0

    @property
    def linear_density(self) -> np.ndarray:
        return self.reference * 10.0 ** (self.power_density / 10.0)

    def band_level(self, f_lo: float, f_hi: float) -> float:
        """Mean density over ``f_lo <= f <= f_hi`` in dB (averaged linearly)."""
        mask = (self.frequencies >= f_lo) & (self.frequencies <= f_hi)
        if not mask.any():
            raise InvalidParameterError(f"no frequency bins in [{f_lo}, {f_hi}] Hz")
        return float(10 * np.log10(self.linear_density[mask].mean() / self.reference))


def psd_estimate(source, segment_length: int = 1024, window: str = "hann",
                 reference: float = 1.0) -> SpectrumEstimate:
    """Welch estimate from a :class:`SampleSeries` or :class:`SignalTrace`.

    Hann segments overlap by half, rectangular segments do not overlap.
    """
    if isinstance(source, SampleSeries):
        values, fs = source.values, source.sampling_rate
    elif isinstance(source, SignalTrace):
        values, fs = source.values, 1.0 / source.time_step
    else:
        raise TypeError("psd_estimate needs a SampleSeries or SignalTrace")
    if window not in WINDOWS:
        raise InvalidParameterError(f"window must be one of {sorted(WINDOWS)}, got {window!r}")
    if segment_length < 4:
        raise InvalidParameterError("segment_length must be >= 4")
    if values.size < 2 * segment_length:
        raise InvalidParameterError(
            f"input of {values.size} points is shorter than 2 segments of {segment_length}")
    if not reference > 0:
        raise InvalidParameterError("reference level must be positive")
    noverlap = segment_length // 2 if window == "hann" else 0
    f, pxx = signal.welch(values, fs=fs, window=WINDOWS[window], nperseg=segment_length,
                          noverlap=noverlap, detrend="constant", scaling="density")
    averages = 1 + (values.size - segment_length) // (segment_length - noverlap)
    with np.errstate(divide="ignore"):
        db = 10 * np.log10(pxx[1:] / reference)
    return SpectrumEstimate(f[1:], db, segment_length, window, averages, reference)


def knee_frequency(spectrum: SpectrumEstimate, plateau: tuple[float, float], drop_db: float = 3.0) -> float:
    """First frequency above the plateau band where the density is ``drop_db`` below it.

    Linear interpolation between the bracketing bins.
    """
    level = spectrum.band_level(*plateau)
    f, db = spectrum.frequencies, spectrum.power_density
    target = level - drop_db
    start = np.searchsorted(f, plateau[1])
    below = np.nonzero(db[start:] <= target)[0]
    if below.size == 0:
        raise InvalidParameterError("spectrum never drops below the knee level")
    i = start + below[0]
    if i == 0:
        return float(f[0])
    f0, f1, d0, d1 = f[i - 1], f[i], db[i - 1], db[i]
    return float(f0 + (target - d0) * (f1 - f0) / (d1 - d0))


def smoothed(spectrum: SpectrumEstimate, bins: int) -> np.ndarray:
    """Moving average of the density (dB of linear mean) over ``bins`` bins."""
    lin = spectrum.linear_density
    kernel = np.ones(bins) / bins
    return 10 * np.log10(np.convolve(lin, kernel, mode="valid") / spectrum.reference)
