"""Autocorrelation of bit streams."""
from __future__ import annotations

import numpy as np

from ..errors import InvalidParameterError, UndefinedNormalizationError
from ..extraction import BitStream


def autocorrelation(bits: BitStream, max_lag: int) -> np.ndarray:
    """Normalized autocorrelation of the +/-1 mapped stream at lags 1..max_lag.

    Uses the biased estimator ``sum(x[i] x[i+k]) / (N * var)`` with the mean
    removed, so every coefficient lies in [-1, 1].
    """
    n = len(bits)
    if not 1 <= max_lag < n:
        raise InvalidParameterError(f"need 1 <= max_lag < length, got max_lag={max_lag}, length={n}")
    x = bits.bits().astype(np.float64)
    x *= 2.0
    x -= 1.0
    x -= x.mean()
    denom = float(x @ x)
    if denom <= 1e-9 * n:
        raise UndefinedNormalizationError("constant bit stream: autocorrelation is undefined")
    out = np.empty(max_lag)
    for k in range(1, max_lag + 1):
        out[k - 1] = x[:-k] @ x[k:]
    return out / denom


def max_abs_autocorrelation(bits: BitStream, max_lag: int = 100) -> float:
    return float(np.max(np.abs(autocorrelation(bits, max_lag))))
