"""Floating-point golden models of the converters.

These use the split rate change of the original software models: a
compensation filter that also interpolates (or decimates) by two, and a CIC
that does the remaining factor of ten. The fixed-point chains use a single
x20 CIC, so comparisons against them are spectral (tone placement and in-band
level), never sample by sample.

All filters here are causal with zero initial state, and every gain is
normalised so that the passband is nominally unity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analysis import Window, magnitude_spectrum
from .cic import CicSpec
from .clocking import FAST_HZ, SLOW_HZ
from .filters import FirSpec, compensator_taps

HALF_RATE = 2 * SLOW_HZ  # 128 kHz between the two rate-change steps
REF_CIC = CicSpec(stages=5, rate=10, delay=1)
REF_TAPS = 63
SIGNAL_BAND = (300.0, 4000.0)


class RateMismatchError(ValueError):
    pass


@dataclass
class FloatStream:
    samples: np.ndarray
    rate: float

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=float)
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("stream contains non-finite values")

    def __len__(self):
        return len(self.samples)


def _causal(x: np.ndarray, h: np.ndarray) -> np.ndarray:
    return np.convolve(x, h)[: len(x)]


def cic_kernel(spec: CicSpec = REF_CIC) -> np.ndarray:
    """Impulse response of the CIC at the high rate, unit DC gain."""
    box = np.ones(spec.rate * spec.delay)
    h = np.array([1.0])
    for _ in range(spec.stages):
        h = np.convolve(h, box)
    return h / h.sum()


def interp2_taps(band=SIGNAL_BAND, dc_anchor: bool = True) -> np.ndarray:
    """Compensation-cum-interpolate-by-2 filter at 128 kHz (gain 2 restores zero stuffing)."""
    lo, hi = band
    return compensator_taps(REF_CIC, HALF_RATE, band, f_high=FAST_HZ, taps=REF_TAPS,
                            stop=SLOW_HZ - hi, stop_weight=1.0, dc_anchor=dc_anchor, gain=2.0)


def decim2_taps(band=SIGNAL_BAND) -> np.ndarray:
    """Compensation-cum-decimate-by-2 filter at 128 kHz."""
    _, hi = band
    return compensator_taps(REF_CIC, HALF_RATE, band, f_high=FAST_HZ, taps=REF_TAPS,
                            stop=SLOW_HZ - hi, stop_weight=1.0)


def _upsample(x: np.ndarray, factor: int) -> np.ndarray:
    y = np.zeros(len(x) * factor)
    y[::factor] = x
    return y


def ref_interp2(stream: FloatStream, band=SIGNAL_BAND, dc_anchor: bool = True) -> FloatStream:
    """64 kHz -> 128 kHz: zero-stuff by two, then the compensating filter."""
    _check_rate(stream, SLOW_HZ)
    return FloatStream(_causal(_upsample(stream.samples, 2), interp2_taps(band, dc_anchor)),
                       HALF_RATE)


def ref_cic_interp10(stream: FloatStream) -> FloatStream:
    """128 kHz -> 1280 kHz through the unit-gain x10 CIC."""
    _check_rate(stream, HALF_RATE)
    # zero stuffing by R divides the gain by R; the kernel is unit-DC-gain so scale back
    up = _causal(_upsample(stream.samples, REF_CIC.rate), cic_kernel() * REF_CIC.rate)
    return FloatStream(up, FAST_HZ)


def ref_cic_decim10(stream: FloatStream) -> FloatStream:
    """1280 kHz -> 128 kHz: unit-gain CIC, keep every tenth sample."""
    _check_rate(stream, FAST_HZ)
    return FloatStream(_causal(stream.samples, cic_kernel())[REF_CIC.rate - 1::REF_CIC.rate],
                       HALF_RATE)


def ref_decim2(stream: FloatStream) -> FloatStream:
    """128 kHz -> 64 kHz: compensating filter, keep every second sample."""
    _check_rate(stream, HALF_RATE)
    return FloatStream(_causal(stream.samples, decim2_taps())[1::2], SLOW_HZ)


def _carrier(n: int, freq: float, rate: float) -> np.ndarray:
    return np.sin(2 * np.pi * freq * np.arange(n) / rate)


def _check_rate(stream: FloatStream, rate: float) -> None:
    if stream.rate != rate:
        raise RateMismatchError(f"expected a {rate:g} Hz stream, got {stream.rate:g} Hz")


def ref_duc(stream: FloatStream, carrier: float) -> FloatStream:
    """64 kHz baseband -> x2 compensating interpolator -> x10 CIC -> carrier mixer."""
    _check_rate(stream, SLOW_HZ)
    if not 200e3 <= carrier <= 500e3:
        raise ValueError("carrier must lie in 200-500 kHz")
    up = ref_cic_interp10(ref_interp2(stream)).samples
    return FloatStream(up * _carrier(len(up), carrier, FAST_HZ), FAST_HZ)


def ref_duc_if(stream: FloatStream, carrier: float, if_hz: float = 20e3,
               if_highpass: FirSpec | None = None,
               output_highpass: FirSpec | None = None) -> FloatStream:
    """``ref_duc`` with the intermediate-frequency stage of the hardware chain.

    The baseband is first mixed onto ``if_hz`` and band-selected, the
    interpolator compensates over the shifted band, and after the carrier
    mixer an optional highpass keeps the upper sideband. Passing the fixed
    chain's highpass specs makes those stages match it response for response.
    """
    _check_rate(stream, SLOW_HZ)
    x = stream.samples * _carrier(len(stream), if_hz, SLOW_HZ)
    if if_highpass is not None:
        x = _causal(x, if_highpass.real_taps)
    band = (if_hz + SIGNAL_BAND[0], if_hz + SIGNAL_BAND[1])
    up = ref_cic_interp10(ref_interp2(FloatStream(x, SLOW_HZ), band, False)).samples
    y = up * _carrier(len(up), carrier, FAST_HZ)
    if output_highpass is not None:
        y = _causal(y, output_highpass.real_taps)
    return FloatStream(y, FAST_HZ)


def ref_ddc(stream: FloatStream) -> FloatStream:
    """1280 kHz baseband -> /10 CIC -> /2 compensating decimator. No mixer."""
    return ref_decim2(ref_cic_decim10(stream))


@dataclass
class SpectrumComparison:
    freqs: np.ndarray
    delta_db: np.ndarray  # a relative to b at each reported tone bin

    @property
    def max_db(self) -> float:
        return float(np.max(np.abs(self.delta_db))) if len(self.delta_db) else 0.0

    @property
    def mean_db(self) -> float:
        return float(np.mean(self.delta_db)) if len(self.delta_db) else 0.0


def compare_spectra(a: FloatStream, b: FloatStream, band: tuple[float, float], *,
                    n: int | None = None, win: Window = "hann", dynamic_range_db: float = 40.0,
                    resampled: bool = False) -> SpectrumComparison:
    """Windowed-DFT comparison of ``a`` against ``b`` over ``band``.

    Bins within ``dynamic_range_db`` of the larger in-band peak count as
    tones; for each the level of ``a`` relative to ``b`` is reported in dB.
    Streams at different rates need ``resampled=True``, in which case both
    are analysed on their own frequency axes and matched by nearest bin.
    """
    if a.rate != b.rate and not resampled:
        raise RateMismatchError(
            f"rates differ ({a.rate:g} vs {b.rate:g} Hz); declare resampled=True")
    if n is None:
        n = min(len(a), len(b))
    fa, ma = magnitude_spectrum(a.samples, a.rate, n, win)
    fb, mb = magnitude_spectrum(b.samples, b.rate, n, win)
    if a.rate != b.rate:
        mb = np.interp(fa, fb, mb)
    lo, hi = band
    sel = (fa >= lo) & (fa <= hi)
    fa, ma, mb = fa[sel], ma[sel], mb[sel]
    peak = max(ma.max(initial=0.0), mb.max(initial=0.0))
    if peak == 0:
        return SpectrumComparison(fa[:0], np.zeros(0))
    tones = np.maximum(ma, mb) >= peak * 10 ** (-dynamic_range_db / 20)
    with np.errstate(divide="ignore"):
        delta = 20 * np.log10(ma[tones] / mb[tones])
    return SpectrumComparison(fa[tones], delta)
