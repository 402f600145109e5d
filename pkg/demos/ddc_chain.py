"""Down-convert a double-sideband 200 kHz signal back to a 4 kHz tone.

The default band-select after the mixer is a highpass, which keeps the
2x-carrier image and drops the baseband; for demodulation the band-select
is switched to a lowpass.
"""
import numpy as np

from ducddc.analysis import dominant_frequency, tone_amplitude
from ducddc.pipeline import DdcConfig, ddc_run

n = np.arange(20 * 400)
x = np.round(4000 * np.sin(2 * np.pi * 4000 * n / 1_280_000)
             * np.sin(2 * np.pi * 200_000 * n / 1_280_000)).astype(int)

for kind in ("highpass", "lowpass"):
    cfg = DdcConfig(band_select_kind=kind)
    y, trace = ddc_run(x, cfg)
    seg = y[40:40 + 256]
    print(f"{kind:>8}: {len(y)} outputs, 4 kHz amplitude {tone_amplitude(seg, 64_000, 4000):7.1f}, "
          f"peak {dominant_frequency(seg, 64_000, 256, 'hann', skip_dc=True):.0f} Hz")
print("expected amplitude with a lowpass:", round(2000 * cfg.nominal_gain, 1))
