"""Single-mode laser phase noise: linewidth, coherence time, phase paths.

The quantum linewidth follows the spontaneous-emission (Henry) formula

    df = v_g**2 * h*nu * g * n_sp * (g - a_L) * (1 + alpha**2) / (8*pi*P0)

and the laser phase is a Wiener process whose increments over a time step
``dt`` have variance ``2*dt/tau_c`` with ``tau_c = 1/(pi*df)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError
from .seeding import STREAM_PHASE, NormalStream, as_seed_sequence, child, describe

SPEED_OF_LIGHT = 299_792_458.0
PLANCK = 6.626_070_15e-34


def photon_energy(wavelength: float) -> float:
    """Photon energy in joules for a vacuum wavelength in metres."""
    return PLANCK * SPEED_OF_LIGHT / wavelength


@dataclass(frozen=True)
class LinewidthModel:
    """Physical parameters mapping output power to quantum linewidth.

    Units are SI: m/s, J, 1/m, Hz.  ``gain - waveguide_loss`` is the facet
    (mirror) loss.
    """

    group_velocity: float = SPEED_OF_LIGHT / 3.6
    photon_energy: float = photon_energy(1550e-9)
    gain: float = 5000.0
    spontaneous_emission_factor: float = 2.0
    waveguide_loss: float = 2000.0
    henry_alpha: float = 5.0
    classical_linewidth_floor: float = 1e6

    def __post_init__(self):
        for name in ("group_velocity", "photon_energy", "gain",
                     "spontaneous_emission_factor", "waveguide_loss"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise InvalidParameterError(f"{name} must be positive and finite, got {value!r}")
        if not self.henry_alpha >= 0:
            raise InvalidParameterError(f"henry_alpha must be >= 0, got {self.henry_alpha!r}")
        if not self.classical_linewidth_floor >= 0:
            raise InvalidParameterError(
                f"classical_linewidth_floor must be >= 0, got {self.classical_linewidth_floor!r}")
        if self.gain <= self.waveguide_loss:
            raise InvalidParameterError(
                f"gain ({self.gain}) must exceed waveguide_loss ({self.waveguide_loss}): "
                "facet loss would be non-positive")

    @property
    def facet_loss(self) -> float:
        return self.gain - self.waveguide_loss

    @property
    def linewidth_power_product(self) -> float:
        """Quantum linewidth times output power (Hz*W); constant for a given laser."""
        return (self.group_velocity ** 2 * self.photon_energy * self.gain
                * self.spontaneous_emission_factor * self.facet_loss
                * (1.0 + self.henry_alpha ** 2) / (8.0 * math.pi))


@dataclass(frozen=True)
class OperatingPoint:
    output_power: float
    label: str = ""

    def __post_init__(self):
        if not (self.output_power > 0 and math.isfinite(self.output_power)):
            raise InvalidParameterError(f"output_power must be positive, got {self.output_power!r}")


@dataclass(frozen=True)
class LinewidthBudget:
    """Quantum plus power-independent classical linewidth (Hz)."""

    quantum: float
    classical: float

    @property
    def total(self) -> float:
        return self.quantum + self.classical

    @property
    def quantum_fraction(self) -> float:
        return self.quantum / self.total

    def __float__(self) -> float:
        return self.total


def quantum_linewidth(model: LinewidthModel, op: OperatingPoint) -> float:
    """Spontaneous-emission linewidth in Hz at the given output power."""
    if not isinstance(op, OperatingPoint):
        op = OperatingPoint(float(op))
    return model.linewidth_power_product / op.output_power


def total_linewidth(model: LinewidthModel, op: OperatingPoint) -> LinewidthBudget:
    return LinewidthBudget(quantum_linewidth(model, op), model.classical_linewidth_floor)


def power_for_linewidth(model: LinewidthModel, linewidth: float, *, total: bool = True) -> float:
    """Output power at which the (total or quantum) linewidth equals ``linewidth``."""
    quantum = linewidth - model.classical_linewidth_floor if total else linewidth
    if not quantum > 0:
        raise InvalidParameterError(
            f"linewidth {linewidth!r} Hz is not above the classical floor "
            f"{model.classical_linewidth_floor!r} Hz")
    return model.linewidth_power_product / quantum


def coherence_time(linewidth: float) -> float:
    """Coherence time ``1/(pi*linewidth)`` in seconds."""
    linewidth = float(linewidth)
    if not (linewidth > 0 and math.isfinite(linewidth)):
        raise InvalidParameterError(f"linewidth must be positive, got {linewidth!r}")
    return 1.0 / (math.pi * linewidth)


# Calibration profile: generic InGaAsP DFB values, with the operating point
# solved so the total linewidth is 30 MHz (the I = 12 mA measurement).
DEFAULT_MODEL = LinewidthModel()
LOW_POWER_POINT = OperatingPoint(power_for_linewidth(DEFAULT_MODEL, 30e6), label="I=12mA (30 MHz)")


def phase_increment_variance(coherence_time: float, time_step: float) -> float:
    return 2.0 * time_step / coherence_time


def _check_durations(**durations: float) -> None:
    for name, value in durations.items():
        if not (value > 0 and math.isfinite(value)):
            raise InvalidParameterError(f"{name} must be positive and finite, got {value!r}")


class PhaseIncrements:
    """Counter-addressed Wiener increments ``theta[i+1] - theta[i]``.

    Lets a long path be produced in arbitrary chunks with identical results.
    """

    def __init__(self, coherence_time: float, time_step: float, seed):
        _check_durations(coherence_time=coherence_time, time_step=time_step)
        self.coherence_time = float(coherence_time)
        self.time_step = float(time_step)
        self.scale = math.sqrt(phase_increment_variance(coherence_time, time_step))
        self._normals = NormalStream(child(seed, STREAM_PHASE))

    def take(self, start: int, stop: int) -> np.ndarray:
        out = self._normals.take(start, stop)
        out *= self.scale
        return out


@dataclass
class PhasePath:
    """Unwrapped laser phase sampled every ``time_step`` seconds."""

    time_step: float
    values: np.ndarray
    coherence_time: float
    seed: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 1 or self.values.size < 2:
            raise InvalidParameterError("a phase path needs at least 2 points")
        _check_durations(time_step=self.time_step)

    def __len__(self) -> int:
        return self.values.size

    @property
    def span(self) -> float:
        return (self.values.size - 1) * self.time_step

    def increments(self) -> np.ndarray:
        return np.diff(self.values)


def simulate_phase_path(coherence_time: float, time_step: float, count: int, seed) -> PhasePath:
    """Wiener phase path with ``count`` points starting at 0 rad.

    Increments are i.i.d. normal with variance ``2*time_step/coherence_time``.
    ``coherence_time=math.inf`` gives a constant phase.
    """
    if count < 2:
        raise InvalidParameterError(f"count must be >= 2, got {count}")
    _check_durations(time_step=time_step)
    if not coherence_time > 0:
        raise InvalidParameterError(f"coherence_time must be positive, got {coherence_time!r}")
    ss = as_seed_sequence(seed)
    values = np.empty(count)
    values[0] = 0.0
    if math.isinf(coherence_time):
        values[1:] = 0.0
    else:
        np.cumsum(PhaseIncrements(coherence_time, time_step, ss).take(0, count - 1), out=values[1:])
    return PhasePath(time_step, values, float(coherence_time), describe(ss))


@dataclass
class PhaseDifference:
    """``theta(t) - theta(t + T_d)`` with the delay snapped to the step grid."""

    values: np.ndarray
    time_step: float
    delay_steps: int
    requested_delay: float

    @property
    def delay(self) -> float:
        return self.delay_steps * self.time_step

    @property
    def snap_error(self) -> float:
        """Snapped minus requested delay (s)."""
        return self.delay - self.requested_delay

    def __len__(self) -> int:
        return self.values.size

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)


def delay_steps(delay: float, time_step: float) -> int:
    """Nearest whole number of simulation steps for ``delay``."""
    if not delay >= 0:
        raise InvalidParameterError(f"delay must be >= 0, got {delay!r}")
    return int(round(delay / time_step))


def delayed_phase_difference(path: PhasePath, delay: float) -> PhaseDifference:
    d = delay_steps(delay, path.time_step)
    if d >= len(path):
        raise InvalidParameterError(
            f"delay {delay!r} s ({d} steps) is not shorter than the path span {path.span!r} s")
    v = path.values
    diff = v[:v.size - d] - v[d:]
    return PhaseDifference(diff, path.time_step, d, float(delay))


def windowed_phase_difference(increments: np.ndarray, d: int) -> np.ndarray:
    """Phase differences from raw increments, without forming the path.

    ``increments[k] = theta[k+1] - theta[k]``; returns
    ``-(increments[i] + ... + increments[i+d-1])`` for each complete window.
    Summation order is fixed per window, so the result for a given sample does
    not depend on where the increment array was cut.
    """
    n = increments.size - d + 1
    if n < 0:
        raise InvalidParameterError("fewer increments than the delay window")
    acc = np.zeros(n)
    for j in range(d):
        acc -= increments[j:j + n]
    return acc
