"""Timing conditions for decorrelated sampling, with and without phase locking.

Free-running:  T_d >> tau_c  and  T_S - T_d >> tau_c + T_R
Phase-locked:  T_S - T_d > T_R

"Much greater" is quantified by ``dominance_factor`` (default 10).
"""
from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import InvalidParameterError

MODES = ("unstabilized", "stabilized")


@dataclass(frozen=True)
class TimingCheck:
    mode: str
    delay: float
    sampling_period: float
    response_time: float
    coherence_time: float | None = None
    dominance_factor: float = 10.0

    def __post_init__(self):
        if self.mode not in MODES:
            raise InvalidParameterError(f"mode must be one of {MODES}, got {self.mode!r}")
        for name in ("delay", "sampling_period", "response_time"):
            if not getattr(self, name) > 0:
                raise InvalidParameterError(f"{name} must be positive, got {getattr(self, name)!r}")
        if self.mode == "unstabilized" and self.coherence_time is None:
            raise InvalidParameterError("unstabilized mode needs the coherence time")
        if self.coherence_time is not None and not self.coherence_time > 0:
            raise InvalidParameterError(f"coherence_time must be positive, got {self.coherence_time!r}")
        if not self.dominance_factor > 1:
            raise InvalidParameterError("dominance_factor must exceed 1")


@dataclass
class TimingVerdict:
    check: TimingCheck
    passed: bool
    margins: dict[str, float] = field(default_factory=dict)
    diagnosis: str = ""

    def to_dict(self) -> dict:
        c = self.check
        return {
            "mode": c.mode, "delay": c.delay, "sampling_period": c.sampling_period,
            "response_time": c.response_time, "coherence_time": c.coherence_time,
            "dominance_factor": c.dominance_factor, "passed": self.passed,
            "margins": dict(self.margins), "diagnosis": self.diagnosis,
        }

    def summary(self) -> str:
        lines = [f"timing ({self.check.mode}): {'PASS' if self.passed else 'FAIL'}"]
        lines += [f"  {k} = {v:.4g}" for k, v in self.margins.items()]
        if self.diagnosis:
            lines.append(f"  {self.diagnosis}")
        return "\n".join(lines)


def validate_timing(check: TimingCheck) -> TimingVerdict:
    """Evaluate the timing inequalities; margins are ratios (>= 1 means satisfied)."""
    c = check
    gap = c.sampling_period - c.delay
    if gap <= 0:
        return TimingVerdict(c, False, {"gap_over_delay": gap / c.delay},
                             "overlapping windows: T_S <= T_d, so consecutive samples draw on "
                             "spontaneous-emission phase noise from a shared time window")
    if c.mode == "stabilized":
        margin = gap / c.response_time
        ok = margin > 1
        diag = "" if ok else "detector memory: T_S - T_d does not exceed the response time T_R"
        return TimingVerdict(c, ok, {"gap_over_response": margin}, diag)
    k = c.dominance_factor
    delay_margin = c.delay / (k * c.coherence_time)
    gap_margin = gap / (k * (c.coherence_time + c.response_time))
    problems = []
    if delay_margin < 1:
        problems.append(f"T_d is not >> tau_c (needs T_d >= {k:g} tau_c); phase difference is "
                        "not uniform over [-pi, pi)")
    if gap_margin < 1:
        problems.append(f"T_S - T_d is not >> tau_c + T_R (needs >= {k:g} x)")
    return TimingVerdict(c, not problems,
                         {"delay_over_coherence": delay_margin, "gap_over_coherence_response": gap_margin},
                         "; ".join(problems))


def minimum_sampling_period(mode: str, response_time: float, coherence_time: float | None = None,
                            delay: float | None = None, dominance_factor: float = 10.0) -> float:
    """Shortest sampling period meeting the conditions (boundary value).

    Without a given ``delay`` the free-running case uses the shortest
    admissible one, ``dominance_factor * coherence_time``.
    """
    if mode == "stabilized":
        if delay is None:
            raise InvalidParameterError("stabilized mode needs the delay")
        return delay + response_time
    if mode != "unstabilized":
        raise InvalidParameterError(f"unknown mode {mode!r}")
    if coherence_time is None:
        raise InvalidParameterError("unstabilized mode needs the coherence time")
    if delay is None:
        delay = dominance_factor * coherence_time
    return delay + dominance_factor * (coherence_time + response_time)
