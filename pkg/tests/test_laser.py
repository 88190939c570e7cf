import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from phaseqrng.errors import InvalidParameterError
from phaseqrng.laser import (
    DEFAULT_MODEL, LOW_POWER_POINT, LinewidthModel, OperatingPoint, PhaseIncrements, coherence_time,
    delay_steps, delayed_phase_difference, power_for_linewidth, quantum_linewidth, simulate_phase_path,
    total_linewidth, windowed_phase_difference,
)


@pytest.mark.parametrize("power", [0.5e-3, 1e-3, 4e-3, 20e-3])
def test_quantum_linewidth_matches_closed_form(power):
    assert quantum_linewidth(DEFAULT_MODEL, OperatingPoint(power)) == pytest.approx(
        oracles.henry_linewidth(power), rel=1e-12)


def test_linewidth_inverse_in_power():
    lw1 = quantum_linewidth(DEFAULT_MODEL, OperatingPoint(1e-3))
    lw3 = quantum_linewidth(DEFAULT_MODEL, OperatingPoint(3e-3))
    assert lw1 / lw3 == pytest.approx(3.0)


def test_low_power_point_calibration():
    budget = total_linewidth(DEFAULT_MODEL, LOW_POWER_POINT)
    assert budget.total == pytest.approx(30e6)
    assert 0 < budget.quantum_fraction < 1
    assert coherence_time(budget) == pytest.approx(1 / (math.pi * 30e6))


def test_power_for_linewidth_roundtrip():
    p = power_for_linewidth(DEFAULT_MODEL, 5e6, total=False)
    assert quantum_linewidth(DEFAULT_MODEL, p) == pytest.approx(5e6)
    with pytest.raises(InvalidParameterError):
        power_for_linewidth(DEFAULT_MODEL, 0.5e6)  # below the classical floor


@pytest.mark.parametrize("kwargs", [
    {"gain": 1000.0, "waveguide_loss": 2000.0},
    {"spontaneous_emission_factor": 0.0},
    {"henry_alpha": -1.0},
    {"group_velocity": math.inf},
])
def test_linewidth_model_validation(kwargs):
    with pytest.raises(InvalidParameterError):
        LinewidthModel(**kwargs)


@pytest.mark.parametrize("bad", [0.0, -1.0, math.nan, math.inf])
def test_coherence_time_rejects(bad):
    with pytest.raises(InvalidParameterError):
        coherence_time(bad)


def test_phase_path_variance_law():
    tau_c, dt = 10e-9, 50e-12
    path = simulate_phase_path(tau_c, dt, 400_001, seed=1)
    assert path.values[0] == 0.0
    inc = path.increments()
    assert inc.var() == pytest.approx(2 * dt / tau_c, rel=0.01)
    pd = delayed_phase_difference(path, 650e-12)
    assert pd.delay_steps == 13 and pd.snap_error == pytest.approx(0.0, abs=1e-21)
    # overlapping windows are correlated, so allow more than the i.i.d. error
    assert np.var(pd) == pytest.approx(oracles.phase_difference_variance(650e-12, tau_c), rel=0.03)


def test_infinite_coherence_is_constant():
    path = simulate_phase_path(math.inf, 1e-12, 100, seed=0)
    assert np.all(path.values == 0)


def test_phase_path_is_seed_deterministic():
    a = simulate_phase_path(1e-9, 1e-11, 1000, 5).values
    assert np.array_equal(a, simulate_phase_path(1e-9, 1e-11, 1000, 5).values)
    assert not np.array_equal(a, simulate_phase_path(1e-9, 1e-11, 1000, 6).values)


def test_delay_longer_than_path_rejected():
    path = simulate_phase_path(1e-9, 1e-11, 10, 0)
    with pytest.raises(InvalidParameterError):
        delayed_phase_difference(path, 1e-9)


@given(d=st.integers(1, 40), cut=st.integers(0, 500))
def test_windowed_difference_is_chunk_independent(d, cut):
    inc = PhaseIncrements(1e-9, 1e-11, 3).take(0, 600)
    whole = windowed_phase_difference(inc, d)
    n = whole.size
    cut = min(cut, n)
    left = windowed_phase_difference(inc[:cut + d - 1], d)
    right = windowed_phase_difference(inc[cut:], d)
    assert np.array_equal(np.concatenate([left, right]), whole)


def test_windowed_difference_matches_path_difference():
    path = simulate_phase_path(1e-9, 1e-11, 2000, 8)
    pd = delayed_phase_difference(path, 2e-10)
    wd = windowed_phase_difference(path.increments(), pd.delay_steps)
    np.testing.assert_allclose(wd, pd.values, atol=1e-12)


@pytest.mark.parametrize("delay,dt,expected", [(650e-12, 50e-12, 13), (250e-12, 50e-12, 5), (0.0, 1e-12, 0)])
def test_delay_steps(delay, dt, expected):
    assert delay_steps(delay, dt) == expected
