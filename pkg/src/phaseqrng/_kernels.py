"""Compiled per-step loops for the frame simulator.

Each kernel does exactly the arithmetic of the corresponding array code in
``laser``, ``interferometer`` and ``detection`` (same operation order), so
composing the public functions reproduces the simulator to rounding level.
"""
from __future__ import annotations

import math

import numba
import numpy as np


@numba.njit(cache=True, nogil=True)
def drift_value(step, knots, knot):
    q = step // knot
    frac = (step - q * knot) / knot
    if q + 1 >= knots.size:
        return knots[knots.size - 1]
    return knots[q] + (knots[q + 1] - knots[q]) * frac


@numba.njit(cache=True, nogil=True)
def update_index(step, time_step, offset, period):
    k = math.floor((step * time_step - offset) / period)
    return max(k, 0)


@numba.njit(cache=True, nogil=True)
def update_step(k, time_step, offset, period):
    return np.int64(np.rint((offset + k * period) / time_step))


@numba.njit(cache=True, nogil=True, boundscheck=False)
def locked_bias(start, n, setpoint, residuals, k_lo, knots, knot, time_step, offset, period, out):
    """Set-point + residual of the active update + drift since that update."""
    has_drift = knots.size > 0
    k_prev = -1
    base = 0.0
    for j in range(n):
        step = start + j
        k = update_index(step, time_step, offset, period)
        if k != k_prev:
            base = setpoint + residuals[k - k_lo]
            if has_drift:
                base -= drift_value(update_step(k, time_step, offset, period), knots, knot)
            k_prev = k
        if has_drift:
            out[j] = base + drift_value(step, knots, knot)
        else:
            out[j] = base


@numba.njit(cache=True, nogil=True, boundscheck=False)
def free_bias(start, n, natural, knots, knot, out):
    for j in range(n):
        out[j] = natural + drift_value(start + j, knots, knot)


@numba.njit(cache=True, nogil=True, boundscheck=False)
def signal_chain(increments, d, bias, visibility, dc, b0, a1, gain, state, dtheta_out, signal_out):
    """Phase difference, interference and cascaded first-order filters.

    ``state[2*m], state[2*m+1]`` hold the previous input/output of filter
    ``m``; a NaN input state means "start in steady state".
    """
    n = signal_out.size
    scalar_bias = bias.size == 1
    nf = b0.size
    for i in range(n):
        acc = 0.0
        for j in range(d):
            acc -= increments[i + j]
        dtheta_out[i] = acc
        b = bias[0] if scalar_bias else bias[i]
        x = math.cos(b + acc) * visibility + dc
        for m in range(nf):
            xp = state[2 * m]
            yp = state[2 * m + 1]
            if math.isnan(xp):
                xp = x
                yp = x
            z = b0[m] * xp - a1[m] * yp
            y = b0[m] * x + z
            state[2 * m] = x
            state[2 * m + 1] = y
            x = y * gain[m]
        signal_out[i] = x
