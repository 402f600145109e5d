"""24-tap FIR filters: design, behavioural convolution and the time-multiplexed MAC.

The MAC engine computes one output per slow-clock sample by running the 24
multiply-accumulates on consecutive master cycles: ``ctrl`` latches the shift
register and clears the accumulator, the next 24 cycles accumulate, and ``fd``
(25 cycles after ``ctrl``) moves the rescaled accumulator into ``y``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .cic import CicSpec, cic_magnitude
from .fixedpoint import RoundingMode, max_value, min_value, requantize, requantize_array

NUM_TAPS = 24
DATA_WIDTH = 14
COEFF_WIDTH = 16
COEFF_FRAC = 15

FilterKind = Literal["highpass", "lowpass", "compensation"]


class ScheduleOverrunError(RuntimeError):
    pass


class FilterDesignError(ValueError):
    pass


@dataclass(frozen=True)
class FirSpec:
    taps: tuple[int, ...]
    kind: FilterKind = "highpass"
    width: int = COEFF_WIDTH
    frac: int = COEFF_FRAC

    def __post_init__(self):
        object.__setattr__(self, "taps", tuple(int(c) for c in self.taps))
        if len(self.taps) != NUM_TAPS:
            raise ValueError(f"expected {NUM_TAPS} taps, got {len(self.taps)}")
        lo, hi = min_value(self.width), max_value(self.width)
        bad = [c for c in self.taps if not lo <= c <= hi]
        if bad:
            raise ValueError(f"coefficients {bad} do not fit {self.width} bits")

    @property
    def real_taps(self) -> np.ndarray:
        return np.asarray(self.taps, dtype=float) / (1 << self.frac)

    def accumulator_width(self, data_width: int = DATA_WIDTH) -> int:
        return data_width + self.width + math.ceil(math.log2(NUM_TAPS))

    def response(self, f, sample_rate: float):
        return frequency_response(self.real_taps, f, sample_rate)


def frequency_response(taps, f, sample_rate: float):
    """|H(f)| of real FIR taps at absolute frequencies ``f``."""
    taps = np.asarray(taps, dtype=float)
    f = np.atleast_1d(np.asarray(f, dtype=float))
    n = np.arange(len(taps))
    h = np.abs(np.exp(-2j * np.pi * np.outer(f, n) / sample_rate) @ taps)
    return h


def quantize_taps(taps, width: int = COEFF_WIDTH, frac: int = COEFF_FRAC) -> tuple[int, ...]:
    scaled = np.round(np.asarray(taps, dtype=float) * (1 << frac))
    if scaled.max() > max_value(width) or scaled.min() < min_value(width):
        raise FilterDesignError(
            f"coefficients exceed the {width}-bit range at frac={frac}; lower frac")
    return tuple(int(c) for c in scaled)


def _windowed_lowpass(cutoff: float, sample_rate: float, n: int) -> np.ndarray:
    m = np.arange(n) - (n - 1) / 2
    h = 2 * cutoff / sample_rate * np.sinc(2 * cutoff / sample_rate * m) * np.hamming(n)
    return h / h.sum()


def _check_edges(cutoff: float, sample_rate: float) -> None:
    if not 0 < cutoff < sample_rate / 2:
        raise FilterDesignError(
            f"cutoff must satisfy 0 < cutoff < sample_rate/2 ({sample_rate / 2:g} Hz); got {cutoff:g}")


def design_lowpass(cutoff: float, sample_rate: float, width: int = COEFF_WIDTH,
                   frac: int = COEFF_FRAC) -> FirSpec:
    """Hamming-windowed sinc, unity DC gain, symmetric taps."""
    _check_edges(cutoff, sample_rate)
    h = _windowed_lowpass(cutoff, sample_rate, NUM_TAPS)
    return FirSpec(quantize_taps(h, width, frac), "lowpass", width, frac)


def design_highpass(cutoff: float, sample_rate: float, width: int = COEFF_WIDTH,
                    frac: int = COEFF_FRAC) -> FirSpec:
    """Windowed-sinc highpass by spectral reversal of a lowpass prototype.

    With an even tap count a symmetric filter has a forced zero at Nyquist, so
    the highpass is the antisymmetric (type IV) filter (-1)**n * h_lp[n], where
    h_lp has cutoff ``sample_rate/2 - cutoff``. Antisymmetry puts an exact zero
    at DC and unity gain at Nyquist.
    """
    _check_edges(cutoff, sample_rate)
    h = _windowed_lowpass(sample_rate / 2 - cutoff, sample_rate, NUM_TAPS)
    h = h * (-1.0) ** np.arange(NUM_TAPS)
    return FirSpec(quantize_taps(h, width, frac), "highpass", width, frac)


def transition_width(sample_rate: float, taps: int = NUM_TAPS) -> float:
    """Approximate Hamming-window transition band, 3.3 * fs / N."""
    return 3.3 * sample_rate / taps


def stopband_attenuation_db(spec: FirSpec, cutoff: float, sample_rate: float) -> float:
    """Worst-case attenuation (dB, positive) over the stopband of a windowed design.

    The stopband is taken to end (highpass) or start (lowpass) one transition
    width away from ``cutoff``.
    """
    edge = transition_width(sample_rate)
    if spec.kind == "highpass":
        f = np.linspace(0.0, max(cutoff - edge, 0.0), 512)
    else:
        f = np.linspace(min(cutoff + edge, sample_rate / 2), sample_rate / 2, 512)
    peak = np.max(spec.response(f, sample_rate))
    return float(-20 * np.log10(max(peak, 1e-12)))


def _ls_symmetric(n: int, sample_rate: float, grid: np.ndarray, target: np.ndarray,
                  weight: np.ndarray, ridge: float = 1e-9) -> np.ndarray:
    """Weighted least-squares linear-phase FIR (symmetric taps) fit to an amplitude target."""
    half = n // 2
    if n % 2:
        k = np.arange(half + 1)
        basis = np.where(k == 0, 1.0, 2.0)[None, :] * np.cos(2 * np.pi * np.outer(grid, k) / sample_rate)
    else:
        k = np.arange(half)
        basis = 2.0 * np.cos(2 * np.pi * np.outer(grid, k + 0.5) / sample_rate)
    sw = np.sqrt(weight)
    a = np.vstack([sw[:, None] * basis, math.sqrt(ridge) * np.eye(basis.shape[1])])
    b = np.concatenate([sw * target, np.zeros(basis.shape[1])])
    c = np.linalg.lstsq(a, b, rcond=None)[0]
    if n % 2:
        return np.concatenate([c[:0:-1], c])
    return np.concatenate([c[::-1], c])


def compensator_taps(cic: CicSpec, sample_rate: float, band=(300.0, 4000.0), *,
                     f_high: float = 1_280_000.0, taps: int = NUM_TAPS,
                     stop: float | None = None, stop_weight: float = 1e-3,
                     dc_anchor: bool = True, gain: float = 1.0) -> np.ndarray:
    """Real-valued inverse-sinc**N compensator taps (see ``design_cic_compensator``)."""
    lo, hi = band
    if not 0 <= lo < hi < sample_rate / 2:
        raise FilterDesignError(f"band {band} must lie inside 0..{sample_rate / 2:g} Hz")
    if stop is None:
        stop = min(hi + 8.0 * sample_rate / 64.0, sample_rate / 2)
    pass_lo = 0.0 if dc_anchor else lo
    f_pass = np.linspace(pass_lo, hi, 256)
    target = gain * cic_magnitude(cic, 0.0, f_high) / cic_magnitude(cic, f_pass, f_high)
    grid, tgt, w = [f_pass], [target], [np.ones_like(f_pass)]
    if stop < sample_rate / 2:
        f_stop = np.linspace(stop, sample_rate / 2, 256)
        grid.append(f_stop)
        tgt.append(np.zeros_like(f_stop))
        w.append(np.full_like(f_stop, stop_weight))
    return _ls_symmetric(taps, sample_rate, np.concatenate(grid), np.concatenate(tgt),
                         np.concatenate(w))


def design_cic_compensator(cic: CicSpec, sample_rate: float, band=(300.0, 4000.0), *,
                           f_high: float = 1_280_000.0, stop: float | None = None,
                           stop_weight: float = 1e-3, dc_anchor: bool = True,
                           width: int = COEFF_WIDTH, frac: int | None = None) -> FirSpec:
    """24-tap linear-phase FIR approximating 1/|H_cic| (normalised) over ``band``.

    ``sample_rate`` is the rate the filter runs at; ``f_high`` is the CIC's high
    rate, against which its droop is evaluated. The fit is a weighted least
    squares on a dense grid: inverse droop on the passband (from DC when
    ``dc_anchor``), zero with a small weight above ``stop``. ``frac`` defaults to
    the largest fraction position that keeps every tap in range.
    """
    h = compensator_taps(cic, sample_rate, band, f_high=f_high, stop=stop,
                         stop_weight=stop_weight, dc_anchor=dc_anchor)
    if frac is None:
        frac = width - 1
        while frac > 0 and np.abs(h).max() * (1 << frac) > max_value(width):
            frac -= 1
    return FirSpec(quantize_taps(h, width, frac), "compensation", width, frac)


def fir_behavioral(x, spec: FirSpec, out_width: int = DATA_WIDTH,
                   mode: RoundingMode = "truncate") -> np.ndarray:
    """y[n] = sum_k c_k x[n-k] (zero history), rescaled by 2**-frac into ``out_width`` bits."""
    y, _ = fir_behavioral_counted(x, spec, out_width, mode)
    return y


def fir_behavioral_counted(x, spec: FirSpec, out_width: int = DATA_WIDTH,
                           mode: RoundingMode = "truncate") -> tuple[np.ndarray, int]:
    x = np.asarray(x, dtype=np.int64)
    acc = np.convolve(x, np.asarray(spec.taps, dtype=np.int64))[: len(x)]
    return requantize_array(acc, spec.frac, out_width, mode)


class MacFilter:
    """Cycle-accurate time-multiplexed FIR (the ``MacState``).

    Drive ``load`` on the slow tick that carries ``ctrl`` and ``step`` on every
    master cycle. ``step`` returns the new ``y`` on the ``fd`` cycle, else None.
    """

    def __init__(self, spec: FirSpec, out_width: int = DATA_WIDTH,
                 mode: RoundingMode = "truncate"):
        self.spec = spec
        self.coeffs = spec.taps
        self.out_width = out_width
        self.mode = mode
        self.acc_width = spec.accumulator_width(out_width)
        self.reset()

    def reset(self) -> None:
        self.shift_register = [0] * NUM_TAPS
        self.tags = [-1] * NUM_TAPS
        self.snapshot: list[int] = []
        self.snapshot_tag = -1
        self.accumulator = 0
        self.step_index = 0
        self.busy = False
        self.y = 0
        self.y_tag = -1
        self.saturations = 0
        self.outputs = 0

    def load(self, x: int, tag: int = -1) -> None:
        """Shift a new sample in (slow clock)."""
        sr = self.shift_register
        sr.pop()
        sr.insert(0, x)
        self.tags.pop()
        self.tags.insert(0, tag)

    def step(self, ctrl: bool, fd: bool) -> int | None:
        if ctrl:
            if self.busy:
                raise ScheduleOverrunError(
                    f"ctrl arrived after {self.step_index} MAC cycles, before fd")
            self.snapshot = list(self.shift_register)
            self.snapshot_tag = self.tags[0]
            self.accumulator = 0
            self.step_index = 0
            self.busy = True
            return None
        if not self.busy:
            return None
        if self.step_index < NUM_TAPS:
            if fd:
                raise ScheduleOverrunError(f"fd after only {self.step_index} MAC cycles")
            k = self.step_index
            self.accumulator += self.coeffs[k] * self.snapshot[k]
            self.step_index = k + 1
            return None
        if fd:
            y, sat = requantize(self.accumulator, self.spec.frac, self.out_width, self.mode)
            self.saturations += sat
            self.y = y
            self.y_tag = self.snapshot_tag
            self.busy = False
            self.outputs += 1
            return y
        return None


def mac_step(state: MacFilter, ctrl: bool, fd: bool, x: int | None = None) -> int | None:
    """Functional form: optionally shift ``x`` in (on ``ctrl``) then clock the MAC once."""
    if ctrl and x is not None:
        state.load(x)
    return state.step(ctrl, fd)
