"""Hogenauer cascaded integrator-comb rate changers.

Integrators run at the 1280 kHz rate, combs at 64 kHz. Every stage is a
register, so the integrator section costs N fast ticks of latency and the comb
section N slow ticks. All internal arithmetic wraps modulo 2**internal_width;
with enough bit growth the final output equals the unbounded-integer result.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .fixedpoint import wrap


@dataclass(frozen=True)
class CicSpec:
    stages: int = 5
    rate: int = 20
    delay: int = 1
    input_width: int = 14

    def __post_init__(self):
        if self.stages < 1 or self.rate < 1 or self.delay < 1:
            raise ValueError("stages, rate and delay must be positive")

    @property
    def growth_bits(self) -> int:
        return self.stages * math.ceil(math.log2(self.rate * self.delay))

    @property
    def internal_width(self) -> int:
        return self.input_width + self.growth_bits

    @property
    def dc_gain(self) -> int:
        """Decimator DC gain (RM)**N."""
        return (self.rate * self.delay) ** self.stages

    @property
    def interpolator_gain(self) -> int:
        """Interpolator DC gain (RM)**N / R (zero stuffing divides by R)."""
        return self.dc_gain // self.rate


def cic_magnitude(spec: CicSpec, f, f_high: float):
    """|sin(pi f R M / f_high) / sin(pi f / f_high)|**N, (RM)**N at DC.

    ``f`` may be a scalar or an array; frequencies are absolute at the high rate.
    """
    f = np.asarray(f, dtype=float)
    rm = spec.rate * spec.delay
    x = np.pi * f / f_high
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.abs(np.sin(rm * x) / np.sin(x))
    ratio = np.where(np.isclose(np.sin(x), 0.0, atol=1e-15), float(rm), ratio)
    out = ratio ** spec.stages
    return float(out) if out.ndim == 0 else out


class _CicBase:
    def __init__(self, spec: CicSpec):
        self.spec = spec
        self.width = spec.internal_width
        self.reset()

    def reset(self) -> None:
        n = self.spec.stages
        self.integ = [0] * n
        self.comb_out = [0] * n
        self.comb_delay = [deque([0] * self.spec.delay) for _ in range(n)]

    def _integrate(self, x: int) -> None:
        w = self.width
        integ = self.integ
        # walk backwards so each register reads its upstream neighbour's pre-edge value
        for k in range(len(integ) - 1, 0, -1):
            integ[k] = wrap(integ[k] + integ[k - 1], w)
        integ[0] = wrap(integ[0] + x, w)

    def _comb(self, x: int) -> None:
        w = self.width
        out = self.comb_out
        for k in range(len(out) - 1, -1, -1):
            v = x if k == 0 else out[k - 1]
            line = self.comb_delay[k]
            out[k] = wrap(v - line[0], w)
            line.popleft()
            line.append(v)


class CicDecimator(_CicBase):
    """Decimate-by-R CIC. Call ``step`` once per high-rate sample."""

    def reset(self) -> None:
        super().reset()
        self.phase = 0

    def integrate(self, x: int) -> None:
        """One fast tick of the integrator section."""
        self._integrate(x)

    def comb(self) -> int:
        """One slow tick of the comb section, sampling the last integrator."""
        self._comb(self.integ[-1])
        return self.comb_out[-1]

    @property
    def output(self) -> int:
        return self.comb_out[-1]

    def step(self, x: int) -> int | None:
        out = None
        # on the coincident edge the comb samples the integrator before it updates
        if self.phase == self.spec.rate - 1:
            out = self.comb()
        self.integrate(x)
        self.phase = (self.phase + 1) % self.spec.rate
        return out


class CicInterpolator(_CicBase):
    """Interpolate-by-R CIC. Call ``step`` once per high-rate tick, with ``x``
    present only on ticks where a low-rate sample arrives."""

    def reset(self) -> None:
        super().reset()
        self.pending = False

    def comb(self, x: int) -> None:
        """One slow tick of the comb section; its output is stuffed into the
        integrators on the next fast tick."""
        self._comb(x)
        self.pending = True

    def integrate(self) -> int:
        """One fast tick of the integrator section (zero-stuffed input)."""
        u = self.comb_out[-1] if self.pending else 0
        self.pending = False
        self._integrate(u)
        return self.integ[-1]

    @property
    def output(self) -> int:
        return self.integ[-1]

    def step(self, x: int | None = None) -> int:
        out = self.integrate()
        if x is not None:
            self.comb(x)
        return out


def cic_decimate(x, spec: CicSpec = CicSpec()) -> np.ndarray:
    """Run a fresh decimator over a whole stream; returns the raw wide outputs."""
    dec = CicDecimator(spec)
    out = []
    for v in x:
        y = dec.step(int(v))
        if y is not None:
            out.append(y)
    return np.array(out, dtype=object if spec.internal_width > 62 else np.int64)


def cic_interpolate(x, spec: CicSpec = CicSpec(), tail: int = 0) -> np.ndarray:
    """Run a fresh interpolator over a low-rate stream (plus ``tail`` zero
    samples to flush); returns ``R`` raw outputs per input."""
    itp = CicInterpolator(spec)
    out = []
    for v in list(x) + [0] * tail:
        out.append(itp.step(int(v)))
        for _ in range(spec.rate - 1):
            out.append(itp.step())
    return np.array(out, dtype=object if spec.internal_width > 62 else np.int64)
