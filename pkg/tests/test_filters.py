import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ducddc.cic import CicSpec, cic_magnitude
from ducddc.clocking import MAC_CYCLES, ClockState
from ducddc.filters import (NUM_TAPS, FilterDesignError, FirSpec, MacFilter,
                            ScheduleOverrunError, design_cic_compensator, design_highpass,
                            design_lowpass, fir_behavioral, fir_behavioral_counted, mac_step,
                            stopband_attenuation_db)

FAST = 1_280_000
SLOW = 64_000
HP = design_highpass(18_000, SLOW)


def oracle_fir(x, taps, frac, width=14):
    """Direct-form convolution with Python ints, floor shift, saturate."""
    lo, hi = -(1 << (width - 1)), (1 << (width - 1)) - 1
    out = []
    for n in range(len(x)):
        acc = sum(taps[k] * x[n - k] for k in range(len(taps)) if n - k >= 0)
        out.append(min(max(acc >> frac, lo), hi))
    return out


def drive_mac(spec, x, slow_ctrl=False):
    """Clock a MacFilter from the master scheduler; return (outputs, ctrl cycles, fd cycles)."""
    clk = ClockState()
    mac = MacFilter(spec)
    src = iter(x)
    outs, ctrl_at, fd_at = [], [], []
    remaining = len(x)
    while len(outs) < len(x):
        ev = clk.advance()
        ctrl = ev.ctrl_slow if slow_ctrl else ev.ctrl
        fd = ev.fd_slow if slow_ctrl else ev.fd
        if ctrl:
            if remaining:
                mac.load(next(src))
                remaining -= 1
            else:
                mac.load(0)
            ctrl_at.append(clk.last_cycle)
        y = mac.step(ctrl, fd)
        if y is not None:
            outs.append(y)
            fd_at.append(clk.last_cycle)
    return outs, ctrl_at, fd_at


def test_fir_behavioral_zero_and_impulse():
    assert not fir_behavioral(np.zeros(50, dtype=int), HP).any()
    # a full-scale-by-frac impulse returns the raw taps
    x = np.zeros(40, dtype=np.int64)
    x[0] = 1
    spec = FirSpec(HP.taps, "highpass", frac=0)
    y = fir_behavioral(x, spec, out_width=20)
    assert y[:NUM_TAPS].tolist() == list(HP.taps) and not y[NUM_TAPS:].any()


def test_fir_behavioral_against_big_int_oracle():
    rng = np.random.default_rng(500)
    x = rng.integers(-8192, 8192, 500)
    assert fir_behavioral(x, HP).tolist() == oracle_fir(x.tolist(), HP.taps, HP.frac)


def test_mac_equals_behavioral_fast_schedule():
    rng = np.random.default_rng(1000)
    x = rng.integers(-8192, 8192, 1000)
    spec = design_lowpass(100_000, FAST)
    outs, ctrl_at, fd_at = drive_mac(spec, x.tolist())
    assert outs == fir_behavioral(x, spec).tolist()
    assert {f - c for c, f in zip(ctrl_at, fd_at)} == {MAC_CYCLES}


def test_mac_equals_behavioral_slow_schedule():
    rng = np.random.default_rng(7)
    x = rng.integers(-8192, 8192, 60)
    outs, ctrl_at, fd_at = drive_mac(HP, x.tolist(), slow_ctrl=True)
    assert outs == fir_behavioral(x, HP).tolist()
    assert {f - c for c, f in zip(ctrl_at, fd_at)} == {MAC_CYCLES}


def test_mac_zero_input():
    outs, _, _ = drive_mac(HP, [0] * 50)
    assert outs == [0] * 50


def test_mac_overrun_detection():
    mac = MacFilter(HP)
    mac.step(True, False)
    for _ in range(5):
        mac.step(False, False)
    with pytest.raises(ScheduleOverrunError):
        mac.step(True, False)
    mac.reset()
    mac.step(True, False)
    with pytest.raises(ScheduleOverrunError):
        mac.step(False, True)


def test_mac_step_functional_form():
    mac = MacFilter(FirSpec((1 << 14,) + (0,) * 23, "lowpass", frac=14))
    assert mac_step(mac, True, False, 1234) is None
    for _ in range(24):
        assert mac_step(mac, False, False) is None
    assert mac_step(mac, False, True) == 1234 and mac.y == 1234


def test_accumulator_width():
    assert HP.accumulator_width() == 35


def test_highpass_design_properties():
    taps = np.array(HP.taps)
    assert np.array_equal(taps, -taps[::-1])  # antisymmetric, exact zero at DC
    h = HP.response([0.0, 12_000.0, 24_000.0], SLOW)
    assert h[0] < 1e-9
    assert 20 * np.log10(h[2]) > -3
    assert 20 * np.log10(h[1]) <= -20
    # DC step: steady-state output below 1% of the input
    y = fir_behavioral(np.full(200, 8000), HP)
    assert np.abs(y[NUM_TAPS:]).max() < 80


@pytest.mark.parametrize("cutoff", [16_000, 17_000, 19_000])
def test_if_select_band(cutoff):
    h = design_highpass(cutoff, SLOW).response([12_000.0, 24_000.0], SLOW)
    assert 20 * np.log10(h[1]) > -3 and 20 * np.log10(h[0]) <= -20


def test_quarter_rate_design_is_linear_phase():
    for spec in (design_highpass(SLOW / 4, SLOW), design_lowpass(SLOW / 4, SLOW)):
        taps = np.array(spec.taps)
        assert np.array_equal(np.abs(taps), np.abs(taps[::-1]))
    lp = np.array(design_lowpass(SLOW / 4, SLOW).taps)
    assert np.array_equal(lp, lp[::-1])


def test_stopband_attenuation_reported():
    assert stopband_attenuation_db(HP, 18_000, SLOW) > 40
    assert stopband_attenuation_db(design_lowpass(100_000, FAST), 100_000, FAST) > 40


@pytest.mark.parametrize("cutoff", [0, -5, 32_000, 40_000])
def test_invalid_cutoff(cutoff):
    with pytest.raises(FilterDesignError, match="sample_rate/2"):
        design_highpass(cutoff, SLOW)


def composite_db(spec, rate, f):
    cic = CicSpec()
    h = spec.response(f, rate) * cic_magnitude(cic, f, FAST) / cic_magnitude(cic, 0.0, FAST)
    return 20 * np.log10(h)


@pytest.mark.parametrize("rate", [FAST, SLOW])
def test_compensator_flatness_and_shape(rate):
    comp = design_cic_compensator(CicSpec(), rate)
    taps = np.array(comp.taps)
    assert np.array_equal(taps, taps[::-1])
    f = np.linspace(300, 4000, 400)
    db = composite_db(comp, rate, f)
    assert db.max() - db.min() <= 1.0
    assert comp.response(0.0, rate)[0] == pytest.approx(1.0, abs=0.01)
    g = comp.response(np.linspace(0, 4000, 200), rate)
    assert np.all(np.diff(g) >= -1e-9)


def test_if_band_compensator():
    comp = design_cic_compensator(CicSpec(), SLOW, band=(20_300, 24_000), dc_anchor=False)
    assert comp.frac < 15  # gains above one need a lower binary point
    f = np.linspace(20_300, 24_000, 400)
    db = composite_db(comp, SLOW, f)
    assert db.max() - db.min() <= 1.0


def test_fir_spec_validation():
    with pytest.raises(ValueError):
        FirSpec((0,) * 23)
    with pytest.raises(ValueError):
        FirSpec((1 << 15,) + (0,) * 23)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(-8192, 8191), min_size=1, max_size=120))
def test_behavioral_matches_oracle_property(x):
    y, n_sat = fir_behavioral_counted(np.array(x), HP)
    assert y.tolist() == oracle_fir(x, HP.taps, HP.frac)
