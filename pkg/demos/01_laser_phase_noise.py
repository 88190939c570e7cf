"""Laser phase noise: from output power to coherence time to phase paths.

The quantum (spontaneous-emission) linewidth falls as 1/P0; a power-independent
classical floor sits on top.  The coherence time sets how fast the phase
diffuses, and the phase difference across a delay T_d has variance 2 T_d/tau_c.
"""
import numpy as np

from phaseqrng.laser import (
    DEFAULT_MODEL, LOW_POWER_POINT, OperatingPoint, coherence_time, delayed_phase_difference,
    simulate_phase_path, total_linewidth,
)

print("Linewidth budget of the default DFB model")
print(f"  {'P0 [mW]':>8} {'quantum [MHz]':>14} {'total [MHz]':>12} {'tau_c [ns]':>11}")
for power in (LOW_POWER_POINT.output_power, 0.5e-3, 1e-3, 2e-3, 5e-3):
    budget = total_linewidth(DEFAULT_MODEL, OperatingPoint(power))
    print(f"  {power * 1e3:8.3f} {budget.quantum / 1e6:14.2f} {budget.total / 1e6:12.2f} "
          f"{coherence_time(budget.total) * 1e9:11.2f}")

# Variance of the delayed phase difference for the two coherence times
# compared in the experiment: the ratio is the ratio of linewidths.
dt, t_d = 50e-12, 650e-12
for tau_c in (10e-9, 320e-9):
    path = simulate_phase_path(tau_c, dt, 2_000_001, seed=1)
    pd = delayed_phase_difference(path, t_d)
    # samples one nanosecond apart do not share increments
    var = np.var(pd.values[::20])
    print(f"tau_c = {tau_c * 1e9:5.0f} ns: Var[dtheta] = {var:.5f} rad^2 (2 T_d/tau_c = {2 * t_d / tau_c:.5f})")
