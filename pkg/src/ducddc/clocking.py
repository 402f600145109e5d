"""Master-clock scheduler for the converter chains.

The 64 MHz master clock is divided by 50 (1280 kHz) and by 1000 (64 kHz).
Ticks are edge events, reported on the master cycle whose advance wraps the
divider phase (49 -> 0, 999 -> 0), so the 1280 kHz clock ticks on cycles
49, 99, ... and the 64 kHz clock on 999, 1999, ...; every slow tick lands on
a fast tick.

``ctrl``/``fd`` are the MAC handshake pulses: ``ctrl`` coincides with the
tick that loads a filter's shift register and ``fd`` follows it by exactly
``MAC_CYCLES`` master cycles. There is one pair for filters fed at 1280 kHz
and one (``ctrl_slow``/``fd_slow``) for filters fed at 64 kHz.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

MASTER_HZ = 64_000_000
FAST_DIV = 50
SLOW_DIV = 1000
FAST_HZ = MASTER_HZ // FAST_DIV
SLOW_HZ = MASTER_HZ // SLOW_DIV
RATE_CHANGE = SLOW_DIV // FAST_DIV
# 24 multiply-accumulates + 1 transfer cycle
MAC_CYCLES = 25
# first master cycle with enable high (half period of the /1000 divider)
ENABLE_CYCLE = SLOW_DIV // 2


class ClockId(enum.Enum):
    MASTER = "clk64m"
    FAST = "clk1280k"
    SLOW = "clk64k"

    @property
    def period(self) -> int:
        """Period in master cycles."""
        return {ClockId.MASTER: 1, ClockId.FAST: FAST_DIV, ClockId.SLOW: SLOW_DIV}[self]

    @property
    def hz(self) -> int:
        return MASTER_HZ // self.period


class TickEvents(NamedTuple):
    tick64k: bool = False
    tick1280k: bool = False
    ctrl: bool = False
    fd: bool = False
    ctrl_slow: bool = False
    fd_slow: bool = False
    enable_rising: bool = False

    @property
    def any(self) -> bool:
        return (self.tick64k or self.tick1280k or self.ctrl or self.fd
                or self.ctrl_slow or self.fd_slow or self.enable_rising)


NO_EVENTS = TickEvents()
# ctrl mirrors tick1280k and ctrl_slow mirrors tick64k, so four flags select the event
_EVENTS = {
    (slow, fast, fd, fd_slow, rising): TickEvents(slow, fast, fast, fd, slow, fd_slow, rising)
    for slow in (False, True) for fast in (False, True) for fd in (False, True)
    for fd_slow in (False, True) for rising in (False, True)
}


@dataclass(slots=True)
class ClockState:
    master_cycle: int = 0
    div1000_phase: int = 0
    div50_phase: int = 0
    enable: bool = False
    ctrl_pulse: bool = False
    fd_pulse: bool = False
    reset_pending: bool = False

    def request_reset(self) -> None:
        """Synchronous reset: applied by the next ``advance``."""
        self.reset_pending = True

    @property
    def last_cycle(self) -> int:
        """The master cycle executed by the most recent ``advance``."""
        return self.master_cycle - 1

    def advance(self) -> TickEvents:
        """Execute one master cycle and report the edges it produced.

        After a reset-applying advance ``last_cycle`` is -1.
        """
        if self.reset_pending:
            self.master_cycle = 0
            self.div1000_phase = 0
            self.div50_phase = 0
            self.enable = False
            self.ctrl_pulse = self.fd_pulse = False
            self.reset_pending = False
            return NO_EVENTS

        cycle = self.master_cycle
        self.master_cycle = cycle + 1
        fast_phase = self.div50_phase + 1
        if fast_phase == FAST_DIV:
            fast_phase = 0
        self.div50_phase = fast_phase
        slow_phase = self.div1000_phase + 1
        if slow_phase == SLOW_DIV:
            slow_phase = 0
        self.div1000_phase = slow_phase
        if (fast_phase and fast_phase != MAC_CYCLES and slow_phase != MAC_CYCLES
                and cycle != ENABLE_CYCLE - 1):
            self.ctrl_pulse = self.fd_pulse = False
            return NO_EVENTS

        tick_fast = fast_phase == 0
        # fd only once a ctrl has been issued
        fd = fast_phase == MAC_CYCLES and cycle >= FAST_DIV - 1 + MAC_CYCLES
        fd_slow = slow_phase == MAC_CYCLES and cycle >= SLOW_DIV - 1 + MAC_CYCLES
        rising = cycle == ENABLE_CYCLE - 1
        if rising:
            self.enable = True
        self.ctrl_pulse = tick_fast
        self.fd_pulse = fd
        if not (tick_fast or fd or fd_slow or rising):
            return NO_EVENTS
        return _EVENTS[slow_phase == 0, tick_fast, fd, fd_slow, rising]

    def enabled_at(self, cycle: int) -> bool:
        return cycle >= ENABLE_CYCLE

    def count_ticks(self, n: int) -> tuple[int, int]:
        """Advance ``n`` cycles; return (64 kHz ticks, 1280 kHz ticks) seen."""
        slow = fast = 0
        advance = self.advance
        for _ in range(n):
            ev = advance()
            if ev is not NO_EVENTS:
                slow += ev.tick64k
                fast += ev.tick1280k
        return slow, fast


def ticks_between(start: int, end: int, which: ClockId) -> int:
    """Number of ``which`` ticks on master cycles in ``[start, end)``."""
    if start > end:
        raise ValueError("start must not exceed end")
    p = which.period
    # a tick on cycle c means (c + 1) is a multiple of p
    return end // p - start // p


def next_tick(cycle: int, which: ClockId) -> int:
    """First master cycle >= ``cycle`` carrying a ``which`` tick."""
    p = which.period
    return cycle + (p - 1 - cycle % p)
