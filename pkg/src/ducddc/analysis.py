"""DFT helpers shared by the reference models, the tests and the CLI."""

from __future__ import annotations

from typing import Literal

import numpy as np

Window = Literal["rectangular", "hann"]

# floor for normalised magnitudes so exact zeros stay finite in dB
_FLOOR = 1e-300


def window(name: Window, n: int) -> np.ndarray:
    if name == "rectangular":
        return np.ones(n)
    if name == "hann":
        # periodic Hann: exact-bin tones leak into exactly one neighbour on each side
        return 0.5 - 0.5 * np.cos(2 * np.pi * np.arange(n) / n)
    raise ValueError(f"unknown window {name!r}")


def magnitude_spectrum(x, rate: float, n: int | None = None,
                       win: Window = "rectangular") -> tuple[np.ndarray, np.ndarray]:
    """One-sided |DFT| of the first ``n`` samples; returns ``(freqs_hz, magnitude)``."""
    x = np.asarray(x, dtype=float)
    if len(x) == 0:
        raise ValueError("empty stream")
    if n is None:
        n = len(x)
    if n > len(x):
        raise ValueError(f"n={n} exceeds stream length {len(x)}")
    seg = x[:n] * window(win, n)
    mag = np.abs(np.fft.rfft(seg))
    return np.fft.rfftfreq(n, 1.0 / rate), mag


def spectrum_db(x, rate: float, n: int | None = None,
                win: Window = "rectangular") -> tuple[np.ndarray, np.ndarray]:
    """Magnitude in dB relative to the peak bin."""
    freqs, mag = magnitude_spectrum(x, rate, n, win)
    peak = mag.max()
    if peak == 0:
        return freqs, np.zeros_like(mag)
    return freqs, 20 * np.log10(np.maximum(mag / peak, _FLOOR))


def dominant_bin(x, n: int | None = None, win: Window = "rectangular",
                 skip_dc: bool = False) -> int:
    _, mag = magnitude_spectrum(x, 1.0, n, win)
    if skip_dc:
        mag = mag.copy()
        mag[0] = 0
    return int(np.argmax(mag))


def dominant_frequency(x, rate: float, n: int | None = None,
                       win: Window = "rectangular", skip_dc: bool = False) -> float:
    n = len(x) if n is None else n
    return dominant_bin(x, n, win, skip_dc) * rate / n


def tone_amplitude(x, rate: float, freq: float) -> float:
    """Amplitude of a sinusoid at ``freq`` by least-squares projection on sin/cos."""
    x = np.asarray(x, dtype=float)
    t = np.arange(len(x)) / rate
    basis = np.column_stack([np.sin(2 * np.pi * freq * t), np.cos(2 * np.pi * freq * t)])
    coef, *_ = np.linalg.lstsq(basis, x, rcond=None)
    return float(np.hypot(*coef))


def samples_per_period(x) -> float:
    """Mean spacing between rising zero crossings of a roughly periodic stream."""
    x = np.asarray(x, dtype=float)
    idx = np.flatnonzero((x[:-1] < 0) & (x[1:] >= 0))
    if len(idx) < 2:
        raise ValueError("fewer than two rising zero crossings")
    return float((idx[-1] - idx[0]) / (len(idx) - 1))
