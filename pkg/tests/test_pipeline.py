import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ducddc.analysis import dominant_frequency
from ducddc.clocking import MAC_CYCLES, ClockId, ticks_between
from ducddc.pipeline import (DDC_BUDGET, DUC_BUDGET, ConfigError, DdcConfig, DucConfig,
                             LatencyViolation, assert_latency, ddc_run, duc_run,
                             expected_first_valid)

DUC = DucConfig()
DDC = DdcConfig()


def sine(n, f, rate, amp=4000):
    return np.round(amp * np.sin(2 * np.pi * f * np.arange(n) / rate)).astype(int)


def test_budget_totals():
    assert expected_first_valid(DDC_BUDGET) == 500 + 9 * 50 + 5 * 1000 == 5950
    assert expected_first_valid(DUC_BUDGET) == 500 + 9 * 1000 + 7 * 50 == 9850


@pytest.mark.parametrize("run, cfg, n, budget", [
    (duc_run, DUC, 16, DUC_BUDGET), (ddc_run, DDC, 320, DDC_BUDGET)])
def test_latency_decomposition(run, cfg, n, budget):
    x = [4000] + [0] * (n - 1)
    _, trace = run(x, cfg)
    report = assert_latency(trace)
    assert report.ok
    assert [(r.stage, r.observed_ticks) for r in report.rows] == [(s, t) for s, _, t in budget]
    assert trace.first_valid_cycle == expected_first_valid(budget)
    assert "first valid output" in report.format()


def test_named_stage_deltas():
    _, duc = duc_run([1000] * 4)
    _, ddc = ddc_run([1000] * 40)
    ddc_ticks = {name: (clock, t) for name, clock, t in ddc.stage_ticks()}
    duc_ticks = {name: (clock, t) for name, clock, t in duc.stage_ticks()}
    assert ddc_ticks["mixer"] == (ClockId.FAST, 1)
    assert duc_ticks["cic_integrators"] == (ClockId.FAST, 5)
    assert duc_ticks["cic_combs"] == (ClockId.SLOW, 5)


def test_latency_violation_is_reported():
    _, trace = ddc_run([100] * 40)
    bad = list(DDC_BUDGET)
    bad[1] = ("mixer", ClockId.FAST, 2)
    with pytest.raises(LatencyViolation) as err:
        assert_latency(trace, bad)
    assert "MISMATCH" in err.value.report.format()


@pytest.mark.parametrize("n", [1, 7, 33])
def test_rate_contract(n):
    y, t = duc_run(sine(n, 4000, 64_000), DUC)
    assert len(y) == 20 * n and t.consumed >= n and t.produced == 20 * n
    y, t = ddc_run(sine(20 * n, 4000, 1_280_000), DDC)
    assert len(y) == n and t.produced == n


@pytest.mark.parametrize("cycles", [40_000, 40_030, 77_777])
def test_rate_contract_fixed_cycles(cycles):
    # after the fill, one output per output-clock tick; the DUC's last one waits for its fd
    _, t = duc_run([0] * 10, DUC, n_master_cycles=cycles)
    assert t.produced == ticks_between(t.output_capture_cycle, cycles - MAC_CYCLES, ClockId.FAST)
    _, t = ddc_run([0] * 10, DDC, n_master_cycles=cycles)
    assert t.produced == ticks_between(t.output_capture_cycle, cycles, ClockId.SLOW)


def test_zero_in_zero_out():
    y, t = duc_run([0] * 20, DUC)
    assert not y.any() and not t.saturations
    y, t = ddc_run([0] * 400, DDC)
    assert not y.any()


def test_no_sequence_errors_on_long_runs():
    _, t = duc_run(sine(200, 4000, 64_000), DUC)
    assert t.sequence_errors == {} and t.saturations == {}
    _, t = ddc_run(sine(2000, 4000, 1_280_000), DDC)
    assert t.sequence_errors == {} and t.saturations == {}


def test_duc_tone_placement():
    y, _ = duc_run(sine(600, 4000, 64_000), DUC)
    seg = y[2000:2000 + 8192]
    assert abs(dominant_frequency(seg, 1_280_000, 8192, "hann") - 224_000) <= 1_280_000 / 8192


def test_determinism():
    x = sine(40, 4000, 64_000)
    y1, t1 = duc_run(x, DUC, record=True)
    y2, t2 = duc_run(x, DucConfig(), record=True)
    assert np.array_equal(y1, y2)
    assert t1.to_dict() == t2.to_dict() and t1.streams == t2.streams


@pytest.mark.parametrize("run, cfg, x, at", [
    (duc_run, DUC, sine(30, 4000, 64_000), 7_777),
    (ddc_run, DDC, sine(400, 4000, 1_280_000), 12_345)])
def test_reset_mid_run_reproduces(run, cfg, x, at):
    y1, t1 = run(x, cfg)
    y2, t2 = run(x, cfg, reset_at=at)
    assert np.array_equal(y1, y2)
    assert t1.to_dict() == t2.to_dict()


def test_saturation_is_counted_not_raised():
    loud = DucConfig(cic_shift=10)
    y, t = duc_run(sine(40, 4000, 64_000, amp=8000), loud)
    assert len(y) == 800 and sum(t.saturations.values()) > 0


def test_config_validation():
    with pytest.raises(ConfigError):
        DucConfig(carrier_ftw=39)
    with pytest.raises(ConfigError):
        DdcConfig(carrier_ftw=101)
    with pytest.raises(ConfigError):
        DdcConfig(band_select_kind="bandpass")
    assert DucConfig(carrier_ftw=100).carrier_hz == 500_000


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_linearity_within_requantization_error(seed):
    # every rescale truncates, so superposition holds to a few LSBs rather than exactly
    rng = np.random.default_rng(seed)
    a = rng.integers(-2000, 2000, 12)
    b = rng.integers(-2000, 2000, 12)
    ya, ta = duc_run(a, DUC)
    yb, tb = duc_run(b, DUC)
    yab, tab = duc_run(a + b, DUC)
    assert not (ta.saturations or tb.saturations or tab.saturations)
    assert np.abs(ya + yb - yab).max() <= 4


def test_ddc_band_select_kinds():
    x = np.round(4000 * np.sin(2 * np.pi * 4000 * np.arange(20 * 300) / 1_280_000)
                 * np.sin(2 * np.pi * 200_000 * np.arange(20 * 300) / 1_280_000)).astype(int)
    lp, _ = ddc_run(x, DdcConfig(band_select_kind="lowpass"))
    hp, _ = ddc_run(x, DdcConfig())
    seg = lp[40:40 + 256]
    assert dominant_frequency(seg, 64_000, 256, "hann", skip_dc=True) == 4000
    # the highpass band-select removes the translated baseband
    assert np.abs(hp[40:]).max() < 0.01 * np.abs(seg).max()
