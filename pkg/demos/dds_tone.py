"""Carrier synthesis with the 256-entry sine table.

The phase accumulator skips ftw table entries per 1280 kHz tick, so every
carrier in the 200-500 kHz band is an exact multiple of 5 kHz.
"""
import numpy as np

from ducddc.analysis import dominant_bin
from ducddc.dds import SINE_LUT, ftw_for_frequency, nco_samples

FREF = 1_280_000

print("table[0], table[32], table[64] =", SINE_LUT[0], SINE_LUT[32], SINE_LUT[64])

for f in (105_000, 200_000, 203_000, 500_000):
    ftw, realized = ftw_for_frequency(f, FREF)
    x = nco_samples(ftw, 1024)
    peak = dominant_bin(x) * FREF / len(x)
    print(f"asked {f:>7} Hz -> ftw {ftw:>3}, realized {realized:>9.0f} Hz, DFT peak {peak:.0f} Hz")

# a 200 kHz carrier repeats every 32 ticks (256 / gcd(40, 256))
x = nco_samples(40, 64)
print("period of ftw=40:", 32, "repeats:", bool(np.array_equal(x[:32], x[32:])))

try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    plt.step(np.arange(64), x, where="post")
    plt.title("ftw = 40 (200 kHz at 1280 kHz)")
    plt.savefig("dds_tone.png", dpi=100)
