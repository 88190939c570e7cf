"""Empirical min-entropy of analog samples."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..detection import SampleSeries
from ..errors import InvalidParameterError


@dataclass(frozen=True)
class MinEntropyEstimate:
    per_sample: float
    """-log2 of the most populated histogram bin."""
    per_bit: float
    """Min-entropy of the mean-threshold bit derived from each sample."""
    max_probability: float
    bin_count: int
    value_range: tuple[float, float]


def min_entropy(series, bin_count: int = 256, value_range: tuple[float, float] | None = None) -> MinEntropyEstimate:
    """Histogram min-entropy ``-log2(max_k p_k)``.

    ``value_range`` defaults to the sample extremes; samples outside an
    explicit range are counted in the edge bins so that probabilities sum to 1.
    """
    values = series.values if isinstance(series, SampleSeries) else np.asarray(series, dtype=np.float64)
    if values.size == 0:
        raise InvalidParameterError("min-entropy of an empty series is undefined")
    if bin_count < 1:
        raise InvalidParameterError("bin_count must be >= 1")
    lo, hi = value_range if value_range is not None else (float(values.min()), float(values.max()))
    if hi > lo:
        idx = np.floor((values - lo) / (hi - lo) * bin_count).astype(np.int64)
        counts = np.bincount(np.clip(idx, 0, bin_count - 1), minlength=bin_count)
    else:
        counts = np.array([values.size])
    p_max = counts.max() / values.size
    ones = np.count_nonzero(values > values.mean()) / values.size
    return MinEntropyEstimate(
        per_sample=float(-math.log2(p_max)) + 0.0,
        per_bit=float(-math.log2(max(ones, 1 - ones))) + 0.0,
        max_probability=float(p_max),
        bin_count=bin_count,
        value_range=(lo, hi),
    )
