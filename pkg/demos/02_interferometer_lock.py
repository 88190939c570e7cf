"""Delayed self-interference, drift and the quadrature lock.

Free-running, the interferometer bias wanders with temperature and the
detected signal moves between fringes.  Locked at 2*m*pi + pi/2, the output
is -sin(dtheta): linear in the laser phase difference to first order.
"""
import numpy as np

from phaseqrng import reference_scenario
from phaseqrng.analysis import minimum_sampling_period, validate_timing
from phaseqrng.pipeline import simulate_trace

cfg = reference_scenario(**{"simulation.chunk_steps": 1 << 16})
n = 200_000  # 10 us at 50 ps
locked = simulate_trace(cfg, n, noise=False)
free = simulate_trace(cfg.replace(**{"mzi.stabilization_enabled": False, "mzi.drift_amplitude": 200.0}),
                      n, noise=False)
for name, tr in (("locked", locked), ("free-running, fast drift", free)):
    halves = tr.values.reshape(2, -1).mean(axis=1)
    print(f"{name:26s} mean first/second half: {halves[0]:+.3f} / {halves[1]:+.3f}, std {tr.values.std():.3f}")

print()
print(validate_timing(cfg.timing_check()).summary())
print(validate_timing(cfg.replace(**{"mzi.stabilization_enabled": False}).timing_check()).summary())
t_r = cfg.detector.response_time
print(f"locked: T_S >= {minimum_sampling_period('stabilized', t_r, delay=cfg.mzi.delay) * 1e9:.2f} ns")
for tau_c in (1e-9, 10e-9):
    t_min = minimum_sampling_period("unstabilized", t_r, tau_c)
    print(f"free-running, tau_c = {tau_c * 1e9:.0f} ns: T_S >= {t_min * 1e9:.0f} ns "
          f"({1e-6 / t_min:.0f} MHz at most)")
