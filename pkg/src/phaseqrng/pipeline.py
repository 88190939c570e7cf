"""End-to-end frame simulation: laser -> interferometer -> detector -> sampler.

A frame is one oscilloscope acquisition of ``sampling.frame_length``
samples.  Each frame draws every random number from its own sub-seed
(``seeding.frame_seed``) and is simulated in fixed-size chunks of
``simulation.chunk_steps`` steps, carrying filter state between chunks.
Frames are the unit of parallelism: results never depend on the number of
workers, and the counter-addressed random streams make them independent of
the chunk size as well.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .config import ScenarioConfig
from .detection import FirstOrderLowpass, SampleSeries, electrical_noise, sample_steps
from .extraction import BitStream, binarize, mean_threshold, xor_combine
from .interferometer import ControlSchedule, SignalTrace, ambient_drift
from .laser import PhaseIncrements, delay_steps
from .seeding import describe, frame_seed

_EMPTY = np.empty(0)


@dataclass
class FrameResult:
    index: int
    series: SampleSeries
    dtheta: np.ndarray  # phase difference at the sampling instants
    seed: dict = field(default_factory=dict)


class _FrameSimulator:
    def __init__(self, cfg: ScenarioConfig, frame_index: int, sweep_index: int = 0,
                 include_scope: bool = True):
        self.cfg = cfg
        self.frame_index = frame_index
        self.seed = frame_seed(cfg.master_seed, frame_index, sweep_index)
        sim, mzi = cfg.simulation, cfg.mzi
        self.dt = sim.time_step
        self.n_steps = cfg.frame_steps
        # successive acquisitions: frame k starts where frame k-1 ended (pickup tones stay coherent)
        self.origin_step = frame_index * self.n_steps
        self.d = delay_steps(mzi.delay, self.dt)
        self.increments = PhaseIncrements(cfg.coherence_time, self.dt, self.seed)

        self.knot = max(1, int(round(sim.drift_resolution / self.dt)))
        if mzi.drift_amplitude > 0:
            n_knots = self.n_steps // self.knot + 2
            self._knots = ambient_drift(mzi, n_knots, self.knot * self.dt, self.seed)
        else:
            self._knots = None

        self.schedule = None
        if mzi.stabilization_enabled:
            self.schedule = ControlSchedule(mzi, cfg.detector.monitor_sampling_period, 0.0, self.dt, self.seed)

        fast = cfg.detector.fast
        self.filters = [FirstOrderLowpass(fast.bandwidth, self.dt, fast.gain)]
        if include_scope and cfg.detector.scope_bandwidth is not None:
            self.filters.append(FirstOrderLowpass(cfg.detector.scope_bandwidth, self.dt))

    def bias(self, start: int, stop: int) -> np.ndarray:
        mzi = self.cfg.mzi
        knots = self._knots if self._knots is not None else _EMPTY
        if self.schedule is None:
            if self._knots is None:
                return np.array([mzi.natural_bias])
            out = np.empty(stop - start)
            _kernels.free_bias(start, stop - start, mzi.natural_bias, knots, self.knot, out)
            return out
        if self._knots is None and mzi.control_error_std == 0:
            return np.array([mzi.setpoint])
        sch = self.schedule
        k_lo = int(sch.update_index(np.array([start]))[0])
        k_hi = int(sch.update_index(np.array([stop - 1]))[0]) + 1
        out = np.empty(stop - start)
        _kernels.locked_bias(start, stop - start, mzi.setpoint, sch.residuals(k_lo, k_hi), k_lo,
                             knots, self.knot, sch.time_step, sch.offset, sch.period, out)
        return out

    def chunks(self, n_steps: int | None = None):
        """Yield ``(start, dtheta, detector_output)`` for consecutive chunks."""
        n_steps = self.n_steps if n_steps is None else n_steps
        mzi = self.cfg.mzi
        size = self.cfg.simulation.chunk_steps
        b0 = np.array([f.b0 for f in self.filters])
        a1 = np.array([f.a1 for f in self.filters])
        gain = np.array([f.gain for f in self.filters])
        state = np.full(2 * len(self.filters), np.nan)
        for start in range(0, n_steps, size):
            stop = min(start + size, n_steps)
            increments = self.increments.take(start, stop + self.d)
            dtheta = np.empty(stop - start)
            out = np.empty(stop - start)
            _kernels.signal_chain(increments, self.d, self.bias(start, stop), mzi.visibility,
                                  mzi.dc_background, b0, a1, gain, state, dtheta, out)
            yield start, dtheta, out

    def noise(self, steps: np.ndarray) -> np.ndarray:
        return electrical_noise(self.cfg.detector.fast, self.seed, self.origin_step + steps, self.dt)

    def run(self) -> FrameResult:
        s = self.cfg.sampling
        idx = sample_steps(s.frame_length, s.period, s.offset, self.dt)
        values = np.empty(idx.size)
        dtheta = np.empty(idx.size)
        lo = 0
        for start, dth, out in self.chunks():
            hi = np.searchsorted(idx, start + out.size, side="left")
            local = idx[lo:hi] - start
            values[lo:hi] = out[local]
            dtheta[lo:hi] = dth[local]
            lo = hi
        if not self.cfg.detector.fast.noiseless:
            values += self.noise(idx)
        series = SampleSeries(s.period, values, None, s.offset,
                              {"frame": self.frame_index, "delay_steps": self.d,
                               "delay_snap_error": self.d * self.dt - self.cfg.mzi.delay})
        return FrameResult(self.frame_index, series, dtheta, describe(self.seed))

    def trace(self, n_steps: int, noise: bool = True) -> SignalTrace:
        parts = [out for _, _, out in self.chunks(n_steps)]
        values = np.concatenate(parts)
        origin = "detector-filtered"
        if noise and not self.cfg.detector.fast.noiseless:
            values += self.noise(np.arange(n_steps))
            origin = "detector-noisy"
        return SignalTrace(self.dt, values, origin,
                           {"frame": self.frame_index, "delay_steps": self.d}, self.origin_step)


def simulate_frame(cfg: ScenarioConfig, frame_index: int = 0, sweep_index: int = 0) -> FrameResult:
    """Simulate one acquisition frame and return its samples."""
    return _FrameSimulator(cfg, frame_index, sweep_index).run()


def simulate_trace(cfg: ScenarioConfig, n_steps: int, frame_index: int = 0, sweep_index: int = 0,
                   include_scope: bool = True, noise: bool = True) -> SignalTrace:
    """Full-resolution detector output for the first ``n_steps`` steps of a frame.

    ``include_scope=False`` drops the oscilloscope stage, as when a spectrum
    analyzer is connected directly to the photodetector.
    """
    return _FrameSimulator(cfg, frame_index, sweep_index, include_scope).trace(n_steps, noise)


def blocked_input_trace(cfg: ScenarioConfig, n_steps: int, frame_index: int = 0) -> SignalTrace:
    """Detector output with the laser blocked: electrical noise only."""
    sim = _FrameSimulator(cfg, frame_index)
    values = sim.noise(np.arange(n_steps))
    return SignalTrace(sim.dt, values, "detector-noisy", {"blocked": True}, sim.origin_step)


def blocked_input_series(cfg: ScenarioConfig, frame_index: int = 0) -> SampleSeries:
    """Sampled electrical noise with the laser blocked (reference floor for spectra)."""
    sim = _FrameSimulator(cfg, frame_index)
    s = cfg.sampling
    idx = sample_steps(s.frame_length, s.period, s.offset, sim.dt)
    return SampleSeries(s.period, sim.noise(idx), None, s.offset, {"blocked": True})


def simulate_frames(cfg: ScenarioConfig, frame_indices, sweep_index: int = 0,
                    workers: int | None = None) -> list[FrameResult]:
    """Simulate several frames, in parallel threads, returned in index order."""
    frame_indices = list(frame_indices)
    workers = cfg.simulation.workers if workers is None else workers
    if workers <= 1 or len(frame_indices) <= 1:
        return [simulate_frame(cfg, i, sweep_index) for i in frame_indices]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda i: simulate_frame(cfg, i, sweep_index), frame_indices))


@dataclass
class RunResult:
    """Bit streams of a run plus per-frame diagnostics."""

    bin1: BitStream
    bin2: BitStream | None
    bin3: BitStream | None
    thresholds: list[float]
    dtheta_variance: float
    first_frame: SampleSeries
    frame_seeds: list[dict]

    @property
    def output(self) -> BitStream:
        return self.bin3 if self.bin3 is not None else self.bin1


def _join(streams: list[BitStream]) -> BitStream:
    out = streams[0]
    for s in streams[1:]:
        out = out.concatenate(s)
    return out


def run_pipeline(cfg: ScenarioConfig, sweep_index: int = 0, workers: int | None = None,
                 sink=None) -> RunResult:
    """Simulate all frames, binarize each against its own mean, XOR pairs.

    With XOR on, frame ``2k`` feeds Bin1 and frame ``2k+1`` feeds Bin2.
    Frames are processed in batches of ``workers`` groups; ``sink``, if
    given, is called as ``sink(bin1_part, bin2_part, bin3_part)`` after each
    group so outputs can be streamed to disk.
    """
    workers = cfg.simulation.workers if workers is None else workers
    group = 2 if cfg.extraction.xor else 1
    n_groups = cfg.sampling.frame_count // group
    parts1, parts2, parts3 = [], [], []
    thresholds, seeds = [], []
    var_sum, var_n = 0.0, 0
    first = None
    for batch_start in range(0, n_groups, workers):
        batch = range(batch_start, min(n_groups, batch_start + workers))
        frames = simulate_frames(cfg, [g * group + j for g in batch for j in range(group)],
                                 sweep_index, workers)
        for k in range(0, len(frames), group):
            fr = frames[k:k + group]
            bits = []
            for f in fr:
                thresholds.append(mean_threshold(f.series))
                bits.append(binarize(f.series))
                seeds.append(f.seed)
                var_sum += float(np.sum(f.dtheta ** 2))
                var_n += f.dtheta.size
                if first is None:
                    first = f.series
            b1 = bits[0]
            b2 = bits[1] if group == 2 else None
            b3 = xor_combine(b1, b2) if group == 2 else None
            parts1.append(b1)
            if group == 2:
                parts2.append(b2)
                parts3.append(b3)
            if sink is not None:
                sink(b1, b2, b3)
        del frames
    return RunResult(
        bin1=_join(parts1),
        bin2=_join(parts2) if parts2 else None,
        bin3=_join(parts3) if parts3 else None,
        thresholds=thresholds,
        dtheta_variance=var_sum / var_n if var_n else math.nan,
        first_frame=first,
        frame_seeds=seeds,
    )
