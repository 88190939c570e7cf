"""From samples to bits: threshold, XOR, and what the checks say.

Each frame is binarized against its own mean.  XOR of two independent frames
turns input biases e_a, e_b into -2 e_a e_b and multiplies correlations.
"""
import numpy as np

from phaseqrng import reference_scenario
from phaseqrng.analysis import autocorrelation, min_entropy, run_battery
from phaseqrng.detection import SampleSeries
from phaseqrng.extraction import binarize, binarize_xor, xor_bias
from phaseqrng.pipeline import run_pipeline

rng = np.random.default_rng(0)
a, b = SampleSeries(1e-9, rng.random(2_000_000)), SampleSeries(1e-9, rng.random(2_000_000))
for eps in (0.01, 0.05, 0.1):
    t = 0.5 - eps
    out = binarize_xor(a, b, t, t)
    print(f"input bias {binarize(a, t).bias():+.4f}: XOR output {out.bias():+.5f} (law {xor_bias(eps, eps):+.5f})")

cfg = reference_scenario(**{"sampling.frame_length": 500_000, "sampling.frame_count": 4})
r = run_pipeline(cfg)
h = min_entropy(r.first_frame)
print(f"\nmin-entropy of the sampled signal: {h.per_sample:.2f} bit/sample (256 bins), {h.per_bit:.4f} per bit")
for name, s in (("Bin1 raw", r.bin1), ("Bin3 xor", r.bin3)):
    acf = autocorrelation(s, 100)
    print(f"{name}: ones {s.ones_fraction():.5f}, lag-1 {acf[0]:+.5f}, max|acf| {np.abs(acf).max():.5f}")
print()
print(run_battery(r.bin3).summary())
