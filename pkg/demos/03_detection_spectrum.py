"""What a spectrum analyzer and an oscilloscope see.

The phase difference integrates the laser's white frequency noise over T_d,
so the detected spectrum is a sinc^2 low-pass whose -3 dB point sits near
0.44/T_d and whose first null is at 1/T_d.  Sampled at 1 GS/s with
T_S > T_d + T_R the samples are decorrelated and the sampled spectrum is flat.
"""
from phaseqrng import reference_scenario
from phaseqrng.analysis import knee_frequency, psd_estimate
from phaseqrng.pipeline import blocked_input_series, simulate_frame, simulate_trace

cfg = reference_scenario(**{"sampling.frame_length": 200_000})
floor = psd_estimate(blocked_input_series(cfg), 1024).linear_density.mean()
print(f"blocked-input floor: {floor:.3e} /Hz (0 dB reference for sampled spectra)")

for t_d in (250e-12, 650e-12):
    c = cfg.replace(**{"mzi.delay": t_d})
    analog = psd_estimate(simulate_trace(c, 1 << 21, include_scope=False), 2048)
    knee = knee_frequency(analog, (0, 0.05 / t_d))
    sampled = psd_estimate(simulate_frame(c, 0).series, 1024, reference=floor)
    print(f"T_d = {t_d * 1e12:.0f} ps: analog plateau {analog.band_level(0, 50e6):7.2f} dB, "
          f"knee {knee / 1e9:.2f} GHz = {knee * t_d:.3f}/T_d; sampled level "
          f"{sampled.band_level(0, 50e6):5.1f} dB above floor, flat to "
          f"{sampled.band_level(400e6, 500e6):5.1f} dB near Nyquist")
