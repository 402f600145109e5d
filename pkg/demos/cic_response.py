"""Droop of the x20 five-stage CIC and how the 24-tap compensator flattens it."""
import numpy as np

from ducddc.analysis import tone_amplitude
from ducddc.cic import CicSpec, cic_decimate, cic_magnitude
from ducddc.filters import design_cic_compensator

cic = CicSpec()
fs_high = 1_280_000
print(f"internal width {cic.internal_width} bits, DC gain {cic.dc_gain}")

f = np.array([300, 1000, 2000, 3000, 4000, 20_000, 24_000, 64_000])
droop = 20 * np.log10(np.maximum(cic_magnitude(cic, f, fs_high) / cic.dc_gain, 1e-12))
for fi, d in zip(f, droop):
    print(f"{fi:>6} Hz  {d:8.2f} dB")

# time-domain check at 4 kHz
n = np.arange(20 * 400)
x = np.round(8000 * np.sin(2 * np.pi * 4000 * n / fs_high)).astype(int)
y = cic_decimate(x)[40:]
print("4 kHz through the decimator: amplitude", round(tone_amplitude(y.astype(float), 64_000, 4000)),
      "expected", round(8000 * cic_magnitude(cic, 4000, fs_high)))

for rate in (1_280_000, 64_000):
    comp = design_cic_compensator(cic, rate)
    band = np.linspace(300, 4000, 200)
    h = comp.response(band, rate) * cic_magnitude(cic, band, fs_high) / cic.dc_gain
    db = 20 * np.log10(h)
    print(f"compensator at {rate // 1000} kHz: ripple {db.max() - db.min():.4f} dB, taps {comp.taps[:4]}...")
