import pytest
from hypothesis import given, settings, strategies as st

from ducddc.clocking import (ENABLE_CYCLE, MAC_CYCLES, ClockId, ClockState, NO_EVENTS,
                             next_tick, ticks_between)


def run_events(n):
    clk = ClockState()
    return [clk.advance() for _ in range(n)], clk


def test_tick_positions():
    events, _ = run_events(2000)
    fast = [c for c, e in enumerate(events) if e.tick1280k]
    slow = [c for c, e in enumerate(events) if e.tick64k]
    assert fast[:3] == [49, 99, 149]
    assert slow == [999, 1999]


def test_enable_rises_on_cycle_499():
    events, clk = run_events(600)
    rising = [c for c, e in enumerate(events) if e.enable_rising]
    assert rising == [ENABLE_CYCLE - 1] == [499]
    assert clk.enable and clk.enabled_at(500) and not clk.enabled_at(499)


def test_slow_ticks_land_on_fast_ticks_and_twenty_between():
    events, _ = run_events(20_000)
    slow = [c for c, e in enumerate(events) if e.tick64k]
    assert all(events[c].tick1280k for c in slow)
    for a, b in zip(slow, slow[1:]):
        assert sum(e.tick1280k for e in events[a + 1:b + 1]) == 20


def test_ctrl_fd_spacing_and_exclusion():
    events, _ = run_events(5000)
    ctrl = [c for c, e in enumerate(events) if e.ctrl]
    fd = [c for c, e in enumerate(events) if e.fd]
    assert not set(ctrl) & set(fd)
    assert [f - c for c, f in zip(ctrl, fd)] == [MAC_CYCLES] * len(fd)
    ctrl_s = [c for c, e in enumerate(events) if e.ctrl_slow]
    fd_s = [c for c, e in enumerate(events) if e.fd_slow]
    assert [f - c for c, f in zip(ctrl_s, fd_s)] == [MAC_CYCLES] * len(fd_s)
    # the MAC window fits inside half of the fastest slow period
    assert MAC_CYCLES <= ClockId.FAST.period // 2


def test_ticks_between_examples():
    assert ticks_between(0, 50, ClockId.FAST) == 1
    assert ticks_between(0, 1000, ClockId.SLOW) == 1
    assert ticks_between(0, 5950, ClockId.SLOW) == 5
    with pytest.raises(ValueError):
        ticks_between(10, 0, ClockId.FAST)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 4000), st.integers(0, 4000))
def test_ticks_between_matches_simulation(a, length):
    events, _ = run_events(a + length)
    for which, flag in ((ClockId.FAST, "tick1280k"), (ClockId.SLOW, "tick64k")):
        seen = sum(getattr(e, flag) for e in events[a:a + length])
        assert ticks_between(a, a + length, which) == seen


@given(st.integers(0, 10**7))
def test_tick_count_closed_form(n):
    assert ticks_between(0, n, ClockId.SLOW) == n // 1000
    assert ticks_between(0, n, ClockId.FAST) == n // 50


def test_next_tick():
    assert next_tick(0, ClockId.FAST) == 49
    assert next_tick(49, ClockId.FAST) == 49
    assert next_tick(50, ClockId.SLOW) == 999


def test_reset_restarts_the_dividers():
    clk = ClockState()
    for _ in range(1234):
        clk.advance()
    clk.request_reset()
    assert clk.advance() is NO_EVENTS
    assert clk.master_cycle == 0 and not clk.enable
    fresh, _ = run_events(3000)
    assert [clk.advance() for _ in range(3000)] == fresh


def test_count_ticks_one_million():
    assert ClockState().count_ticks(1_000_000) == (1000, 20_000)
