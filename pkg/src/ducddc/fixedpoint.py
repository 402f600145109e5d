"""Two's-complement fixed-point words.

Every datapath register in the converters is an integer with an explicit
bit width. ``QSample`` is the checked value type used at module boundaries;
the scalar helpers (``wrap``, ``saturate``, ``requantize``) operate on plain
ints and are what the cycle loops call.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

RoundingMode = Literal["truncate", "round-half-away"]

MIN_WIDTH = 2
MAX_WIDTH = 128


class WidthMismatchError(ValueError):
    pass


def min_value(width: int) -> int:
    return -(1 << (width - 1))


def max_value(width: int) -> int:
    return (1 << (width - 1)) - 1


def wrap(value: int, width: int) -> int:
    """Reduce ``value`` modulo 2**width into the signed range."""
    mask = (1 << width) - 1
    value &= mask
    if value >> (width - 1):
        value -= 1 << width
    return value


def saturate(value: int, width: int) -> tuple[int, bool]:
    lo = -(1 << (width - 1))
    hi = (1 << (width - 1)) - 1
    if value > hi:
        return hi, True
    if value < lo:
        return lo, True
    return value, False


def shift_right(value: int, shift: int, mode: RoundingMode = "truncate") -> int:
    """Arithmetic right shift. ``truncate`` floors toward -inf."""
    if shift == 0:
        return value
    if mode == "truncate":
        return value >> shift
    if mode == "round-half-away":
        half = 1 << (shift - 1)
        if value >= 0:
            return (value + half) >> shift
        return -((-value + half) >> shift)
    raise ValueError(f"unknown rounding mode {mode!r}")


def requantize(value: int, shift: int, out_width: int,
               mode: RoundingMode = "truncate") -> tuple[int, bool]:
    """Shift then saturate; returns ``(result, saturated)``."""
    return saturate(shift_right(value, shift, mode), out_width)


def requantize_array(values: np.ndarray, shift: int, out_width: int,
                     mode: RoundingMode = "truncate") -> tuple[np.ndarray, int]:
    """Vectorised ``requantize`` for int64 arrays; returns ``(result, n_saturated)``."""
    v = np.asarray(values, dtype=np.int64)
    if shift:
        if mode == "truncate":
            v = v >> shift
        elif mode == "round-half-away":
            half = np.int64(1 << (shift - 1))
            v = np.where(v >= 0, (v + half) >> shift, -((-v + half) >> shift))
        else:
            raise ValueError(f"unknown rounding mode {mode!r}")
    lo, hi = min_value(out_width), max_value(out_width)
    n_sat = int(np.count_nonzero((v < lo) | (v > hi)))
    return np.clip(v, lo, hi), n_sat


@dataclass(frozen=True, slots=True)
class QSample:
    value: int
    width: int

    def __post_init__(self):
        if not MIN_WIDTH <= self.width <= MAX_WIDTH:
            raise ValueError(f"width {self.width} outside {MIN_WIDTH}..{MAX_WIDTH}")
        if not min_value(self.width) <= self.value <= max_value(self.width):
            raise ValueError(f"{self.value} does not fit in {self.width} bits")

    @classmethod
    def wrapped(cls, value: int, width: int) -> QSample:
        return cls(wrap(value, width), width)

    def __int__(self):
        return self.value


def _check_same_width(a: QSample, b: QSample) -> None:
    if a.width != b.width:
        raise WidthMismatchError(f"width mismatch: {a.width} vs {b.width}")


def wrapping_add(a: QSample, b: QSample) -> QSample:
    _check_same_width(a, b)
    return QSample(wrap(a.value + b.value, a.width), a.width)


def wrapping_sub(a: QSample, b: QSample) -> QSample:
    _check_same_width(a, b)
    return QSample(wrap(a.value - b.value, a.width), a.width)


def mul_full(a: QSample, b: QSample) -> QSample:
    # |product| <= 2**(wa-1) * 2**(wb-1) = 2**(wa+wb-2), always fits wa+wb bits
    return QSample(a.value * b.value, a.width + b.width)


def rescale(a: QSample, shift: int, out_width: int,
            mode: RoundingMode = "truncate") -> QSample:
    if shift < 0:
        raise ValueError("shift must be non-negative")
    if out_width < MIN_WIDTH:
        raise ValueError("out_width must be at least 2")
    value, _ = requantize(a.value, shift, out_width, mode)
    return QSample(value, out_width)
