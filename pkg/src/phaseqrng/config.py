"""Scenario configuration: one YAML document with a section per subsystem.

Example (every key is optional; omitted keys take the defaults below)::

    master_seed: 2009
    laser:
      coherence_time: 1.0e-8          # or omit and give linewidth_model/output_power
    mzi:
      delay: 6.5e-10
      stabilization_enabled: true
      control_error_std: 0.01
    detector:
      fast: {bandwidth: 5.0e9, white_noise_std: 0.02,
             spectral_spikes: [[4.7e7, 0.004, 0.0]]}
      scope_bandwidth: 3.0e9          # null removes the oscilloscope stage
    sampling: {period: 1.0e-9, offset: 0.0, frame_length: 10000000, frame_count: 2}
    extraction: {xor: true}
    analysis: {alpha: 0.01, max_lag: 100, psd_segment: 1024, psd_window: hann}
    simulation: {time_step: 5.0e-11, chunk_steps: 1048576, workers: 1}

Durations are in seconds, frequencies in Hz, phases in radians.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from pathlib import Path

import yaml

from .detection import FAST_DETECTOR, MONITOR_DETECTOR, MONITOR_SAMPLING_PERIOD, SCOPE_BANDWIDTH, DetectorConfig
from .errors import ConfigError
from .interferometer import MziConfig
from .laser import DEFAULT_MODEL, LOW_POWER_POINT, LinewidthModel, OperatingPoint, coherence_time, total_linewidth

DEFAULT_MASTER_SEED = 2009


@dataclass(frozen=True)
class LaserSection:
    coherence_time: float | None = None
    linewidth_model: LinewidthModel = DEFAULT_MODEL
    output_power: float = LOW_POWER_POINT.output_power
    label: str = LOW_POWER_POINT.label

    def resolved_coherence_time(self) -> float:
        """Direct value if given, else from the total linewidth at ``output_power``."""
        if self.coherence_time is not None:
            if not self.coherence_time > 0:
                raise ConfigError(f"laser.coherence_time must be positive, got {self.coherence_time!r}")
            return float(self.coherence_time)
        budget = total_linewidth(self.linewidth_model, OperatingPoint(self.output_power, self.label))
        return coherence_time(budget.total)


@dataclass(frozen=True)
class DetectorSection:
    fast: DetectorConfig = FAST_DETECTOR
    scope_bandwidth: float | None = SCOPE_BANDWIDTH
    monitor: DetectorConfig = MONITOR_DETECTOR
    monitor_sampling_period: float = MONITOR_SAMPLING_PERIOD

    @property
    def response_time(self) -> float:
        """T_R of the random-number channel, taken from the photodetector bandwidth."""
        return self.fast.response_time


@dataclass(frozen=True)
class SamplingSection:
    period: float = 1e-9
    offset: float = 0.0
    frame_length: int = 10_000_000
    frame_count: int = 2


@dataclass(frozen=True)
class ExtractionSection:
    xor: bool = True


@dataclass(frozen=True)
class AnalysisSection:
    alpha: float = 0.01
    max_lag: int = 100
    psd_segment: int = 1024
    psd_window: str = "hann"
    min_entropy_bins: int = 256
    dominance_factor: float = 10.0


@dataclass(frozen=True)
class SimulationSection:
    time_step: float = 50e-12
    chunk_steps: int = 1 << 20
    workers: int = 1
    drift_resolution: float = 50e-9
    memory_budget: float = 2e9  # bytes


@dataclass(frozen=True)
class ScenarioConfig:
    laser: LaserSection = LaserSection()
    mzi: MziConfig = MziConfig()
    detector: DetectorSection = DetectorSection()
    sampling: SamplingSection = SamplingSection()
    extraction: ExtractionSection = ExtractionSection()
    analysis: AnalysisSection = AnalysisSection()
    simulation: SimulationSection = SimulationSection()
    master_seed: int = DEFAULT_MASTER_SEED

    def __post_init__(self):
        validate(self)

    # -- convenience -------------------------------------------------------
    def replace(self, **changes) -> ScenarioConfig:
        """Copy with dotted-path overrides, e.g. ``replace(**{"mzi.delay": 2.5e-10})``."""
        data = self.to_dict()
        for path, value in changes.items():
            node = data
            *parents, leaf = path.split(".")
            for p in parents:
                node = node[p]
            if leaf not in node:
                raise ConfigError(f"unknown field {path!r}")
            node[leaf] = value
        return from_dict(data)

    @property
    def coherence_time(self) -> float:
        return self.laser.resolved_coherence_time()

    @property
    def frame_steps(self) -> int:
        s = self.sampling
        return int(round((s.offset + (s.frame_length - 1) * s.period) / self.simulation.time_step)) + 1

    def timing_check(self):
        from .analysis.timing import TimingCheck

        return TimingCheck(
            mode="stabilized" if self.mzi.stabilization_enabled else "unstabilized",
            delay=self.mzi.delay,
            sampling_period=self.sampling.period,
            response_time=self.detector.response_time,
            coherence_time=self.coherence_time,
            dominance_factor=self.analysis.dominance_factor,
        )

    def to_dict(self) -> dict:
        return _to_plain(self)

    def dump(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False)


def validate(cfg: ScenarioConfig) -> None:
    s, sim = cfg.sampling, cfg.simulation
    if not (s.period > 0 and 0 <= s.offset < s.period):
        raise ConfigError("sampling.period must be positive and 0 <= sampling.offset < period")
    if s.frame_length < 1 or s.frame_count < 1:
        raise ConfigError("sampling.frame_length and sampling.frame_count must be >= 1")
    if cfg.extraction.xor and s.frame_count % 2:
        raise ConfigError(
            f"XOR extraction pairs frames (Bin1, Bin2): frame_count must be even, got {s.frame_count}")
    if not sim.time_step > 0 or s.period < sim.time_step:
        raise ConfigError("simulation.time_step must be positive and not exceed sampling.period")
    if sim.chunk_steps < 1024 or sim.workers < 1:
        raise ConfigError("simulation.chunk_steps must be >= 1024 and simulation.workers >= 1")
    if not 0 < cfg.analysis.alpha < 1:
        raise ConfigError("analysis.alpha must lie in (0, 1)")
    if cfg.analysis.psd_window not in ("hann", "rectangular"):
        raise ConfigError("analysis.psd_window must be 'hann' or 'rectangular'")
    if not cfg.analysis.dominance_factor > 1:
        raise ConfigError("analysis.dominance_factor must exceed 1")
    if not isinstance(cfg.master_seed, int) or cfg.master_seed < 0:
        raise ConfigError("master_seed must be a non-negative integer")
    # resident memory: samples + phase differences of frames in flight, ~8 chunk-sized work arrays each
    frames_in_flight = 2 * sim.workers if cfg.extraction.xor else sim.workers
    need = 8.0 * frames_in_flight * (2 * s.frame_length + 8 * sim.chunk_steps)
    if need > sim.memory_budget:
        raise ConfigError(
            f"estimated memory {need / 1e9:.2f} GB exceeds simulation.memory_budget "
            f"{sim.memory_budget / 1e9:.2f} GB; reduce frame_length, chunk_steps or workers")
    cfg.laser.resolved_coherence_time()


def _to_plain(obj):
    if dataclasses.is_dataclass(obj):
        return {f.name: _to_plain(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, (tuple, list)):
        return [_to_plain(v) for v in obj]
    if isinstance(obj, float) and math.isinf(obj):
        return ".inf"
    return obj


_SECTIONS = {
    "laser": LaserSection, "mzi": MziConfig, "detector": DetectorSection,
    "sampling": SamplingSection, "extraction": ExtractionSection,
    "analysis": AnalysisSection, "simulation": SimulationSection,
}
_NESTED = {
    ("laser", "linewidth_model"): LinewidthModel,
    ("detector", "fast"): DetectorConfig,
    ("detector", "monitor"): DetectorConfig,
}
_INT_FIELDS = {"frame_length", "frame_count", "max_lag", "psd_segment", "min_entropy_bins",
               "chunk_steps", "workers", "setpoint_index", "master_seed"}


_STR_FIELDS = {"label", "psd_window"}


def _coerce(path: str, name: str, value):
    if name in _INT_FIELDS and not isinstance(value, str):
        if isinstance(value, float) and value.is_integer():
            value = int(value)
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{path}: expected an integer, got {value!r}")
        return value
    if isinstance(value, str) and name not in _STR_FIELDS:
        # YAML 1.1 reads exponents without a dot ("1e3") as strings
        if value in (".inf", "+.inf", "-.inf"):
            return float(value.replace(".", ""))
        try:
            value = float(value)
        except ValueError:
            raise ConfigError(f"{path}: expected a number, got {value!r}") from None
        if name in _INT_FIELDS:
            return _coerce(path, name, value)
    return value


def _build(cls, data, path: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a mapping, got {type(data).__name__}")
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - names
    if unknown:
        raise ConfigError(f"{path}: unknown field(s) {', '.join(sorted(unknown))}")
    kwargs = {}
    for key, value in data.items():
        sub = _NESTED.get((path, key))
        if sub is not None:
            value = _build(sub, value, f"{path}.{key}")
        elif key == "spectral_spikes":
            value = tuple(tuple(s) for s in (value or ()))
        else:
            value = _coerce(f"{path}.{key}", key, value)
        kwargs[key] = value
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def from_dict(data: dict | None) -> ScenarioConfig:
    data = dict(data or {})
    unknown = set(data) - set(_SECTIONS) - {"master_seed"}
    if unknown:
        raise ConfigError(f"unknown section(s) {', '.join(sorted(unknown))}")
    kwargs = {name: _build(cls, data[name], name) for name, cls in _SECTIONS.items() if name in data}
    if "master_seed" in data:
        kwargs["master_seed"] = _coerce("master_seed", "master_seed", data["master_seed"])
    try:
        return ScenarioConfig(**kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def loads(text: str) -> ScenarioConfig:
    try:
        data = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark
        where = f"line {mark.line + 1}, column {mark.column + 1}" if mark else "unknown position"
        raise ConfigError(f"YAML syntax error at {where}: {exc.problem}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"YAML error: {exc}") from exc
    if data is not None and not isinstance(data, dict):
        raise ConfigError("scenario file must contain a mapping at top level")
    return from_dict(data)


def load(path) -> ScenarioConfig:
    return loads(Path(path).read_text())


def reference_scenario(**overrides) -> ScenarioConfig:
    """Default operating point: 10 ns coherence time, 650 ps delay, 1 GS/s, locked."""
    cfg = ScenarioConfig(laser=LaserSection(coherence_time=10e-9))
    return cfg.replace(**overrides) if overrides else cfg


def ideal_scenario(**overrides) -> ScenarioConfig:
    """Reference operating point with every classical noise source switched off."""
    cfg = reference_scenario(**{
        "mzi.control_error_std": 0.0,
        "mzi.drift_amplitude": 0.0,
        "detector.fast": dataclasses.asdict(DetectorConfig(5e9)),
    })
    return cfg.replace(**overrides) if overrides else cfg
