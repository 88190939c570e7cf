"""Randomness validation and diagnostics."""
from .battery import TestReport, TestResult, run_battery
from .correlation import autocorrelation, max_abs_autocorrelation
from .entropy import MinEntropyEstimate, min_entropy
from .spectrum import SpectrumEstimate, knee_frequency, psd_estimate
from .timing import TimingCheck, TimingVerdict, minimum_sampling_period, validate_timing

__all__ = [
    "MinEntropyEstimate", "SpectrumEstimate", "TestReport", "TestResult", "TimingCheck",
    "TimingVerdict", "autocorrelation", "knee_frequency", "max_abs_autocorrelation",
    "min_entropy", "minimum_sampling_period", "psd_estimate", "run_battery", "validate_timing",
]
