"""Imbalanced Mach-Zehnder interferometer with drift and phase locking.

After DC removal the detected signal is ``visibility * cos(bias + dtheta)``
where ``bias`` is the interferometer phase ``omega0 * T_d`` plus ambient
drift (unlocked) or the lock set-point ``2*m*pi + pi/2`` plus the controller
residual (locked).  At the set-point ``S - dc = -visibility * sin(dtheta)``;
the overall sign has no effect on threshold bits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolationError, InvalidParameterError
from .laser import SPEED_OF_LIGHT, PhaseDifference
from .seeding import STREAM_CONTROL, STREAM_DRIFT, NormalStream, child

TWO_PI = 2.0 * math.pi

ORIGINS = ("interferometer", "detector-filtered", "detector-noisy")


@dataclass(frozen=True)
class MziConfig:
    delay: float = 650e-12
    optical_angular_frequency: float = TWO_PI * SPEED_OF_LIGHT / 1550e-9
    visibility: float = 1.0
    dc_background: float = 0.0
    stabilization_enabled: bool = True
    setpoint_index: int = 0
    control_error_std: float = 0.01
    drift_amplitude: float = 1.0
    drift_timescale: float = 1.0

    def __post_init__(self):
        if not (self.delay > 0 and math.isfinite(self.delay)):
            raise InvalidParameterError(f"delay must be positive, got {self.delay!r}")
        if not 0.0 <= self.visibility <= 1.0:
            raise InvalidParameterError(f"visibility must lie in [0, 1], got {self.visibility!r}")
        if not self.optical_angular_frequency > 0:
            raise InvalidParameterError("optical_angular_frequency must be positive")
        for name in ("control_error_std", "drift_amplitude"):
            if not getattr(self, name) >= 0:
                raise InvalidParameterError(f"{name} must be >= 0, got {getattr(self, name)!r}")
        if not self.drift_timescale > 0:
            raise InvalidParameterError(f"drift_timescale must be positive, got {self.drift_timescale!r}")

    @classmethod
    def from_path_imbalance(cls, length_imbalance: float, refractive_index: float = 1.468, **kwargs):
        """Build from a fibre length imbalance: ``T_d = n * dL / c``."""
        if not (length_imbalance > 0 and refractive_index > 0):
            raise InvalidParameterError("length imbalance and refractive index must be positive")
        return cls(delay=refractive_index * length_imbalance / SPEED_OF_LIGHT, **kwargs)

    @property
    def natural_bias(self) -> float:
        """``omega0 * T_d`` reduced to [0, 2*pi)."""
        return math.fmod(self.optical_angular_frequency * self.delay, TWO_PI)

    @property
    def setpoint(self) -> float:
        return TWO_PI * self.setpoint_index + math.pi / 2


@dataclass
class SignalTrace:
    """Finely sampled analog signal; value ``j`` is at time ``(start_index + j) * time_step``."""

    time_step: float
    values: np.ndarray
    origin: str = "interferometer"
    metadata: dict = field(default_factory=dict)
    start_index: int = 0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 1 or self.values.size < 1:
            raise InvalidParameterError("a signal trace needs at least one value")
        if not self.time_step > 0:
            raise InvalidParameterError(f"time_step must be positive, got {self.time_step!r}")
        if self.origin not in ORIGINS:
            raise InvalidParameterError(f"unknown origin {self.origin!r}")

    def __len__(self) -> int:
        return self.values.size

    @property
    def start_time(self) -> float:
        return self.start_index * self.time_step

    @property
    def span(self) -> float:
        return (self.values.size - 1) * self.time_step

    def times(self) -> np.ndarray:
        return (self.start_index + np.arange(self.values.size)) * self.time_step

    def replace(self, values: np.ndarray, origin: str, **extra_metadata) -> SignalTrace:
        return SignalTrace(self.time_step, values, origin,
                           {**self.metadata, **extra_metadata}, self.start_index)


def interference_signal(dphase, cfg: MziConfig, bias_path, *, time_step: float | None = None,
                        start_index: int = 0) -> SignalTrace:
    """``dc + visibility * cos(bias_path + dphase)`` as a trace.

    ``bias_path`` is the instantaneous total interferometer phase; a scalar is
    broadcast.  ``time_step`` defaults to that of a :class:`PhaseDifference`.
    """
    if isinstance(dphase, PhaseDifference):
        time_step = dphase.time_step if time_step is None else time_step
        meta = {"delay_steps": dphase.delay_steps, "delay_snap_error": dphase.snap_error}
        dphase = dphase.values
    else:
        meta = {}
        dphase = np.asarray(dphase, dtype=np.float64)
    if time_step is None:
        raise InvalidParameterError("time_step is required for a bare phase-difference array")
    bias = np.asarray(bias_path, dtype=np.float64)
    if bias.ndim and bias.shape != dphase.shape:
        raise InvalidParameterError(
            f"bias path length {bias.size} does not match phase difference length {dphase.size}")
    values = np.add(bias, dphase)
    np.cos(values, out=values)
    values *= cfg.visibility
    values += cfg.dc_background
    meta["mzi"] = cfg
    return SignalTrace(time_step, values, "interferometer", meta, start_index)


def drift_step_std(cfg: MziConfig, time_step: float) -> float:
    return cfg.drift_amplitude * math.sqrt(time_step / cfg.drift_timescale)


def ambient_drift(cfg: MziConfig, count: int, time_step: float, seed) -> np.ndarray:
    """Slow random walk of the interferometer phase, starting at 0 rad.

    The RMS change over a time ``t`` is ``drift_amplitude * sqrt(t / drift_timescale)``.
    """
    if count < 1:
        raise InvalidParameterError(f"count must be >= 1, got {count}")
    if not time_step > 0:
        raise InvalidParameterError(f"time_step must be positive, got {time_step!r}")
    out = np.zeros(count)
    if cfg.drift_amplitude == 0 or count == 1:
        return out
    steps = NormalStream(child(seed, STREAM_DRIFT)).take(0, count - 1)
    steps *= drift_step_std(cfg, time_step)
    np.cumsum(steps, out=out[1:])
    return out


class ControlSchedule:
    """Lock updates at ``offset + k * period``; update ``k`` adds residual ``e_k``.

    Between updates the bias follows the ambient drift accumulated since the
    last update.  Steps before the first update belong to update 0.
    """

    def __init__(self, cfg: MziConfig, period: float, offset: float, time_step: float, seed):
        if not cfg.stabilization_enabled:
            raise ContractViolationError(
                "stabilized_bias requires stabilization_enabled; for a free-running "
                "interferometer use natural_bias + ambient drift")
        if not (period > 0 and time_step > 0):
            raise InvalidParameterError("update period and time step must be positive")
        self.cfg = cfg
        self.period = float(period)
        self.offset = float(offset)
        self.time_step = float(time_step)
        self._residuals = NormalStream(child(seed, STREAM_CONTROL))

    def update_index(self, steps: np.ndarray) -> np.ndarray:
        k = np.floor((steps * self.time_step - self.offset) / self.period).astype(np.int64)
        return np.maximum(k, 0)

    def update_step(self, k: np.ndarray) -> np.ndarray:
        return np.rint((self.offset + k * self.period) / self.time_step).astype(np.int64)

    def residuals(self, k_lo: int, k_hi: int) -> np.ndarray:
        """Residuals for updates ``k_lo <= k < k_hi``."""
        if self.cfg.control_error_std == 0:
            return np.zeros(k_hi - k_lo)
        return self.cfg.control_error_std * self._residuals.take(k_lo, k_hi)

    def bias(self, start: int, drift: np.ndarray, drift_at) -> np.ndarray:
        """Bias for steps ``start .. start+len(drift)-1``.

        ``drift_at(step_indices)`` must return the drift at arbitrary steps
        (the last update may precede the segment).
        """
        steps = np.arange(start, start + drift.size)
        k = self.update_index(steps)
        k_lo, k_hi = int(k[0]), int(k[-1]) + 1
        e = self.residuals(k_lo, k_hi)
        anchor = drift_at(self.update_step(np.arange(k_lo, k_hi)))
        idx = k - k_lo
        return self.cfg.setpoint + e[idx] + (drift - anchor[idx])


def stabilized_bias(drift: np.ndarray, cfg: MziConfig, monitor, seed, time_step: float) -> np.ndarray:
    """Total interferometer phase under the idealized phase lock.

    ``monitor`` is the slow-channel :class:`~phaseqrng.detection.SampleSeries`;
    its sampling instants are the controller update instants.  Each update
    clamps the bias to the set-point plus a Gaussian residual of standard
    deviation ``cfg.control_error_std``.
    """
    drift = np.asarray(drift, dtype=np.float64)
    if drift.size == 0:
        raise InvalidParameterError("drift sequence is empty")
    sched = ControlSchedule(cfg, monitor.sampling_period, monitor.sample_offset, time_step, seed)

    def drift_at(steps):
        return drift[np.clip(steps, 0, drift.size - 1)]

    return sched.bias(0, drift, drift_at)
