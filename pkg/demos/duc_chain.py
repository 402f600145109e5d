"""Up-convert a 4 kHz tone onto a 200 kHz carrier.

The chain mixes onto a 20 kHz IF first, so the wanted sideband lands at
200 + 20 + 4 = 224 kHz. The floating-point golden chain is run alongside.
"""
import numpy as np

from ducddc.analysis import dominant_frequency, spectrum_db, tone_amplitude
from ducddc.pipeline import DucConfig, duc_run
from ducddc.refmodel import FloatStream, compare_spectra, ref_duc_if

cfg = DucConfig(carrier_ftw=40)
x = np.round(4000 * np.sin(2 * np.pi * 4000 * np.arange(1200) / 64_000)).astype(int)
y, trace = duc_run(x, cfg)
print(f"{trace.consumed} inputs -> {trace.produced} outputs, saturations {trace.saturations}")

seg = y[2000:2000 + 8192]
print("dominant tone:", dominant_frequency(seg, 1_280_000, 8192, "hann"), "Hz")
freqs, db = spectrum_db(seg, 1_280_000, 8192, "hann")
for f in (176_000, 184_000, 216_000, 224_000, 240_000):
    print(f"  {f / 1000:5.0f} kHz {db[int(round(f / (1_280_000 / 8192)))]:7.1f} dB")

gold = ref_duc_if(FloatStream(x, 64_000), cfg.carrier_hz, if_highpass=cfg.if_highpass,
                  output_highpass=cfg.output_highpass)
gseg = gold.samples[2000:2000 + 8192]
print("224 kHz level: fixed", round(tone_amplitude(seg, 1_280_000, 224_000) / cfg.nominal_gain, 1),
      "golden", round(tone_amplitude(gseg, 1_280_000, 224_000), 1))
cmp = compare_spectra(FloatStream(seg / cfg.nominal_gain, 1_280_000), FloatStream(gseg, 1_280_000),
                      (220_000, 224_500))
print(f"in-band delta: max {cmp.max_db:.2f} dB")
