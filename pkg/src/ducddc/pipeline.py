"""Cycle-accurate DUC and DDC chains driven from the 64 MHz master clock.

Each stage is a register (or a MAC filter whose ``y`` register is written on
``fd``) clocked by its own derived clock. Within one master cycle all stages
read their upstream neighbour's pre-edge value, which is why the update code
below walks each chain from its output back to its input.

Every register carries a tag: the index of the newest input sample that has
reached it (-1 while it still holds reset contents). Tags give the
first-valid cycle of every stage, the latency decomposition, and the check
that the MAC filters neither skip nor repeat a sample.

Latency accounting: a stage is charged the number of ticks of its own clock
between its input becoming valid and its own capture. The budgeted
first-valid cycle is ``ENABLE_CYCLE + sum(ticks * period)``, the convention of
the itemised budgets (each tick counted as a full clock period). The raw
master cycle of the output capture is reported alongside as
``output_capture_cycle``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .cic import CicDecimator, CicInterpolator, CicSpec
from .clocking import (ENABLE_CYCLE, FAST_HZ, SLOW_HZ, ClockId, ClockState,
                       ticks_between)
from .dds import AMPLITUDE, Nco, TABLE_SIZE
from .filters import (DATA_WIDTH, FirSpec, MacFilter, design_cic_compensator,
                      design_highpass, design_lowpass)
from .fixedpoint import RoundingMode, requantize

CARRIER_FTW_RANGE = (40, 100)
IF_FTW = 80  # 20 kHz at the 64 kHz reference


class ConfigError(ValueError):
    pass


class LatencyViolation(AssertionError):
    def __init__(self, report: LatencyReport):
        super().__init__(report.format())
        self.report = report


def _check_carrier(ftw: int) -> None:
    lo, hi = CARRIER_FTW_RANGE
    if not lo <= ftw <= hi:
        raise ConfigError(
            f"carrier tuning word {ftw} ({ftw * FAST_HZ / TABLE_SIZE:g} Hz) outside "
            f"{lo}..{hi} (200-500 kHz)")


@dataclass
class DucConfig:
    carrier_ftw: int = 40
    if_ftw: int = IF_FTW
    if_highpass: FirSpec | None = None
    compensation: FirSpec | None = None
    output_highpass: FirSpec | None = None
    cic: CicSpec = field(default_factory=CicSpec)
    mixer_shift: int = 7
    cic_shift: int = 18
    rounding: RoundingMode = "truncate"

    def __post_init__(self):
        _check_carrier(self.carrier_ftw)
        if self.if_highpass is None:
            self.if_highpass = design_highpass(18_000.0, SLOW_HZ)
        if self.compensation is None:
            # the compensator sits after the IF mixer, so it flattens the IF band
            if_hz = self.if_ftw * SLOW_HZ / TABLE_SIZE
            self.compensation = design_cic_compensator(
                self.cic, SLOW_HZ, band=(if_hz + 300.0, if_hz + 4000.0), dc_anchor=False)
        if self.output_highpass is None:
            self.output_highpass = design_highpass(self.carrier_hz, FAST_HZ)

    @property
    def carrier_hz(self) -> float:
        return self.carrier_ftw * FAST_HZ / TABLE_SIZE

    @property
    def if_hz(self) -> float:
        return self.if_ftw * SLOW_HZ / TABLE_SIZE

    @property
    def nominal_gain(self) -> float:
        """Passband gain from the power-of-two rescales and the DDS full scale."""
        dds = AMPLITUDE / (1 << self.mixer_shift)
        return dds * dds * self.cic.interpolator_gain / (1 << self.cic_shift)


@dataclass
class DdcConfig:
    carrier_ftw: int = 40
    band_select_kind: str = "highpass"
    band_select_cutoff: float = 100_000.0
    band_select: FirSpec | None = None
    compensation: FirSpec | None = None
    cic: CicSpec = field(default_factory=CicSpec)
    mixer_shift: int = 7
    cic_shift: int = 22
    rounding: RoundingMode = "truncate"

    def __post_init__(self):
        _check_carrier(self.carrier_ftw)
        if self.band_select is None:
            if self.band_select_kind == "highpass":
                self.band_select = design_highpass(self.band_select_cutoff, FAST_HZ)
            elif self.band_select_kind == "lowpass":
                self.band_select = design_lowpass(self.band_select_cutoff, FAST_HZ)
            else:
                raise ConfigError(f"band_select_kind must be highpass or lowpass, "
                                  f"got {self.band_select_kind!r}")
        if self.compensation is None:
            self.compensation = design_cic_compensator(self.cic, FAST_HZ)

    @property
    def carrier_hz(self) -> float:
        return self.carrier_ftw * FAST_HZ / TABLE_SIZE

    @property
    def nominal_gain(self) -> float:
        return AMPLITUDE / (1 << self.mixer_shift) * self.cic.dc_gain / (1 << self.cic_shift)


DUC_BUDGET = (
    ("register", ClockId.SLOW, 1),
    ("if_mixer", ClockId.SLOW, 1),
    ("highpass", ClockId.SLOW, 1),
    ("compensation", ClockId.SLOW, 1),
    ("cic_combs", ClockId.SLOW, 5),
    ("cic_integrators", ClockId.FAST, 5),
    ("carrier_mixer", ClockId.FAST, 1),
    ("output_highpass", ClockId.FAST, 1),
)

DDC_BUDGET = (
    ("register", ClockId.FAST, 1),
    ("mixer", ClockId.FAST, 1),
    ("band_select", ClockId.FAST, 1),
    ("compensation", ClockId.FAST, 1),
    ("cic_integrators", ClockId.FAST, 5),
    ("cic_combs", ClockId.SLOW, 5),
)


@dataclass
class StageRecord:
    name: str
    clock: ClockId
    first_valid_cycle: int | None = None


@dataclass
class PipelineTrace:
    chain: str
    stages: list[StageRecord]
    enable_cycle: int = ENABLE_CYCLE
    carrier_hz: float = 0.0
    carrier_ftw: int = 0
    nominal_gain: float = 1.0
    consumed: int = 0
    produced: int = 0
    master_cycles: int = 0
    saturations: dict[str, int] = field(default_factory=dict)
    sequence_errors: dict[str, int] = field(default_factory=dict)
    streams: dict[str, list[tuple[int, int]]] | None = None

    def stage(self, name: str) -> StageRecord:
        for s in self.stages:
            if s.name == name:
                return s
        raise KeyError(name)

    def stage_ticks(self) -> list[tuple[str, ClockId, int | None]]:
        """Observed ticks charged to each stage, in its own clock."""
        out = []
        start = self.enable_cycle
        for s in self.stages:
            if start is None or s.first_valid_cycle is None:
                out.append((s.name, s.clock, None))
                start = None
                continue
            out.append((s.name, s.clock, ticks_between(start, s.first_valid_cycle + 1, s.clock)))
            start = s.first_valid_cycle + 1
        return out

    @property
    def first_valid_cycle(self) -> int | None:
        """Budgeted master cycle of the first valid output (see module docstring)."""
        total = self.enable_cycle
        for _, clock, ticks in self.stage_ticks():
            if ticks is None:
                return None
            total += ticks * clock.period
        return total

    @property
    def output_capture_cycle(self) -> int | None:
        return self.stages[-1].first_valid_cycle

    def to_dict(self) -> dict:
        return {
            "chain": self.chain,
            "carrier_hz": self.carrier_hz,
            "carrier_ftw": self.carrier_ftw,
            "nominal_gain": self.nominal_gain,
            "enable_cycle": self.enable_cycle,
            "first_valid_cycle": self.first_valid_cycle,
            "output_capture_cycle": self.output_capture_cycle,
            "consumed": self.consumed,
            "produced": self.produced,
            "master_cycles": self.master_cycles,
            "stages": [
                {"name": name, "clock": clock.value, "ticks": ticks,
                 "first_valid_cycle": self.stage(name).first_valid_cycle}
                for name, clock, ticks in self.stage_ticks()
            ],
            "saturations": dict(self.saturations),
            "sequence_errors": dict(self.sequence_errors),
        }


@dataclass
class LatencyRow:
    stage: str
    clock: ClockId
    expected_ticks: int
    observed_ticks: int | None

    @property
    def ok(self) -> bool:
        return self.expected_ticks == self.observed_ticks


@dataclass
class LatencyReport:
    chain: str
    rows: list[LatencyRow]
    expected_cycle: int
    observed_cycle: int | None
    output_capture_cycle: int | None

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.rows) and self.expected_cycle == self.observed_cycle

    def format(self) -> str:
        lines = [f"{self.chain.upper()} latency"]
        for r in self.rows:
            mark = "ok" if r.ok else "MISMATCH"
            lines.append(f"  {r.stage:<16} {r.clock.value:<9} expected {r.expected_ticks:>2} "
                         f"observed {r.observed_ticks!s:>4}  {mark}")
        lines.append(f"  first valid output: expected cycle {self.expected_cycle}, "
                     f"observed {self.observed_cycle} (raw capture at {self.output_capture_cycle})")
        return "\n".join(lines)


def expected_first_valid(budget) -> int:
    return ENABLE_CYCLE + sum(ticks * clock.period for _, clock, ticks in budget)


def assert_latency(trace: PipelineTrace, budget=None) -> LatencyReport:
    """Compare a trace's per-stage tick charges with the itemised budget.

    Raises ``LatencyViolation`` on any mismatch; returns the report otherwise.
    """
    if budget is None:
        budget = DUC_BUDGET if trace.chain == "duc" else DDC_BUDGET
    observed = {name: (clock, ticks) for name, clock, ticks in trace.stage_ticks()}
    rows = []
    for name, clock, ticks in budget:
        obs_clock, obs_ticks = observed.get(name, (clock, None))
        if obs_clock is not clock:
            obs_ticks = None
        rows.append(LatencyRow(name, clock, ticks, obs_ticks))
    report = LatencyReport(trace.chain, rows, expected_first_valid(budget),
                           trace.first_valid_cycle, trace.output_capture_cycle)
    if not report.ok:
        raise LatencyViolation(report)
    return report


class _Input:
    """Input port: real samples, then zeros. Tags keep counting through the flush."""

    def __init__(self, samples: Iterable[int]):
        self.samples = [int(v) for v in samples]
        self.next = 0

    def take(self) -> tuple[int, int]:
        i = self.next
        self.next = i + 1
        v = self.samples[i] if i < len(self.samples) else 0
        return v, i

    @property
    def consumed(self) -> int:
        return min(self.next, len(self.samples))


def _shift_tags(tags: list[int], head: int) -> None:
    """Registered chain: every register takes its upstream neighbour's pre-edge tag."""
    for k in range(len(tags) - 1, 0, -1):
        tags[k] = tags[k - 1]
    tags[0] = head


def _accumulate_tags(tags: list[int], head: int) -> None:
    """Integrator chain: a register's newest contributor is the newer of its own and its input's."""
    for k in range(len(tags) - 1, 0, -1):
        if tags[k - 1] > tags[k]:
            tags[k] = tags[k - 1]
    if head > tags[0]:
        tags[0] = head


class _Chain:
    chain = ""
    budget: tuple = ()

    def __init__(self, cfg, record: bool = False):
        self.cfg = cfg
        self.record = record
        self._reset_requested = False
        self.reset()

    def request_reset(self) -> None:
        """Synchronous reset: all state clears on the next master cycle."""
        self._reset_requested = True

    def _new_trace(self) -> PipelineTrace:
        return PipelineTrace(
            chain=self.chain,
            stages=[StageRecord(name, clock) for name, clock, _ in self.budget],
            carrier_hz=self.cfg.carrier_hz, carrier_ftw=self.cfg.carrier_ftw,
            nominal_gain=self.cfg.nominal_gain,
            streams={name: [] for name, _, _ in self.budget} if self.record else None,
        )

    def _mark(self, index: int, tag: int, cycle: int, value: int) -> None:
        s = self.trace.stages[index]
        if tag >= 0 and s.first_valid_cycle is None:
            s.first_valid_cycle = cycle
        if self.record and tag >= 0:
            self.trace.streams[s.name].append((cycle, value))

    def _check_sequence(self, name: str, mac: MacFilter, last: dict) -> None:
        tag = mac.y_tag
        prev = last.get(name, -1)
        if tag >= 0 and prev >= 0 and tag != prev + 1:
            self.trace.sequence_errors[name] = self.trace.sequence_errors.get(name, 0) + 1
        last[name] = tag

    def _sat(self, name: str, flag: bool) -> None:
        if flag:
            self.trace.saturations[name] = self.trace.saturations.get(name, 0) + 1

    def cycle(self) -> None:
        """Advance one master cycle."""
        if self._reset_requested:
            # chip state clears on this edge; the test bench re-presents its stream
            self._reset_requested = False
            source = self.input
            self.reset()
            source.next = 0
            self.input = source
            self.clock.request_reset()
        self._cycle()

    def _finish_trace(self) -> None:
        for name, mac in self._macs().items():
            if mac.saturations:
                self.trace.saturations[name] = self.trace.saturations.get(name, 0) + mac.saturations
        self.trace.master_cycles = self.clock.master_cycle

    def run(self, samples: Iterable[int], n_master_cycles: int | None = None,
            reset_at: int | None = None) -> tuple[np.ndarray, PipelineTrace]:
        """Feed ``samples`` from reset. With ``n_master_cycles`` run exactly that
        long; otherwise run until every real sample has been answered.

        ``reset_at`` asserts the synchronous reset after that many master
        cycles; the chain then restarts and the input is presented again.
        """
        self.reset()
        self.input = _Input(samples)
        target = self._target_outputs(len(self.input.samples))
        steps = 0
        if n_master_cycles is not None:
            for _ in range(n_master_cycles):
                if steps == reset_at:
                    self.request_reset()
                self.cycle()
                steps += 1
        else:
            while (steps <= (reset_at or 0) or len(self.outputs) < max(target, 1)
                   or self.trace.output_capture_cycle is None):
                if steps == reset_at:
                    self.request_reset()
                self.cycle()
                steps += 1
            del self.outputs[target:]
        self._finish_trace()
        self.trace.consumed = self.input.consumed
        self.trace.produced = len(self.outputs)
        return np.asarray(self.outputs, dtype=np.int64), self.trace


class DucPipeline(_Chain):
    chain = "duc"
    budget = DUC_BUDGET

    def reset(self) -> None:
        cfg = self.cfg
        self.clock = ClockState()
        self.input = _Input([])
        self.if_nco = Nco(cfg.if_ftw)
        self.carrier_nco = Nco(cfg.carrier_ftw)
        self.if_nco_out = 0
        self.carrier_nco_out = 0
        self.in_val, self.in_tag = 0, -1
        self.ifmix, self.ifmix_tag = 0, -1
        self.hp = MacFilter(cfg.if_highpass, mode=cfg.rounding)
        self.comp = MacFilter(cfg.compensation, mode=cfg.rounding)
        self.cic = CicInterpolator(cfg.cic)
        self.comb_tags = [-1] * cfg.cic.stages
        self.integ_tags = [-1] * cfg.cic.stages
        self.cmix, self.cmix_tag = 0, -1
        self.fast_seq = -1
        self.out_hp = MacFilter(cfg.output_highpass, mode=cfg.rounding)
        self.outputs: list[int] = []
        self._last_tags: dict = {}
        self.trace = self._new_trace()

    def _macs(self) -> dict[str, MacFilter]:
        return {"highpass": self.hp, "compensation": self.comp, "output_highpass": self.out_hp}

    def _target_outputs(self, n: int) -> int:
        return n * self.cfg.cic.rate

    def _cycle(self) -> None:
        ev = self.clock.advance()
        c = self.clock.master_cycle - 1
        if c < ENABLE_CYCLE:
            return
        cfg = self.cfg
        if ev.tick1280k:
            # fast side first: it reads the slow side's pre-edge registers
            self.out_hp.load(self.cmix, self.cmix_tag)
            self._mark(7, self.cmix_tag, c, self.cmix)
            cic_val, sat = requantize(self.cic.output, cfg.cic_shift, DATA_WIDTH, cfg.rounding)
            self._sat("cic_output", sat)
            self.cmix, sat = requantize(cic_val * self.carrier_nco_out, cfg.mixer_shift,
                                        DATA_WIDTH, cfg.rounding)
            self._sat("carrier_mixer", sat)
            if self.integ_tags[-1] >= 0:
                # fast-domain sequence number: input tags repeat R times after interpolation
                self.fast_seq += 1
                self.cmix_tag = self.fast_seq
            self._mark(6, self.cmix_tag, c, self.cmix)
            self.carrier_nco_out = self.carrier_nco.step()
            u_tag = self.comb_tags[-1] if self.cic.pending else -1
            self.cic.integrate()
            _accumulate_tags(self.integ_tags, u_tag)
            self._mark(5, self.integ_tags[-1], c, self.cic.output)
            if ev.tick64k:
                self.cic.comb(self.comp.y)
                _shift_tags(self.comb_tags, self.comp.y_tag)
                self._mark(4, self.comb_tags[-1], c, self.cic.comb_out[-1])
                self.comp.load(self.hp.y, self.hp.y_tag)
                self._mark(3, self.hp.y_tag, c, self.hp.y)
                self.hp.load(self.ifmix, self.ifmix_tag)
                self._mark(2, self.ifmix_tag, c, self.ifmix)
                self.ifmix, sat = requantize(self.in_val * self.if_nco_out, cfg.mixer_shift,
                                             DATA_WIDTH, cfg.rounding)
                self._sat("if_mixer", sat)
                self.ifmix_tag = self.in_tag
                self._mark(1, self.ifmix_tag, c, self.ifmix)
                self.if_nco_out = self.if_nco.step()
                self.in_val, self.in_tag = self.input.take()
                self._mark(0, self.in_tag, c, self.in_val)
        if self.hp.busy or ev.ctrl_slow:
            if self.hp.step(ev.ctrl_slow, ev.fd_slow) is not None:
                self._check_sequence("highpass", self.hp, self._last_tags)
            if self.comp.step(ev.ctrl_slow, ev.fd_slow) is not None:
                self._check_sequence("compensation", self.comp, self._last_tags)
        if self.out_hp.busy or ev.ctrl:
            y = self.out_hp.step(ev.ctrl, ev.fd)
            if y is not None:
                self._check_sequence("output_highpass", self.out_hp, self._last_tags)
                if self.out_hp.y_tag >= 0:
                    self.outputs.append(y)


class DdcPipeline(_Chain):
    chain = "ddc"
    budget = DDC_BUDGET

    def reset(self) -> None:
        cfg = self.cfg
        self.clock = ClockState()
        self.input = _Input([])
        self.nco = Nco(cfg.carrier_ftw)
        self.nco_out = 0
        self.in_val, self.in_tag = 0, -1
        self.mix, self.mix_tag = 0, -1
        self.bs = MacFilter(cfg.band_select, mode=cfg.rounding)
        self.comp = MacFilter(cfg.compensation, mode=cfg.rounding)
        self.cic = CicDecimator(cfg.cic)
        self.integ_tags = [-1] * cfg.cic.stages
        self.comb_tags = [-1] * cfg.cic.stages
        self.outputs: list[int] = []
        self._last_tags: dict = {}
        self.trace = self._new_trace()

    def _macs(self) -> dict[str, MacFilter]:
        return {"band_select": self.bs, "compensation": self.comp}

    def _target_outputs(self, n: int) -> int:
        return n // self.cfg.cic.rate

    def _cycle(self) -> None:
        ev = self.clock.advance()
        c = self.clock.master_cycle - 1
        if c < ENABLE_CYCLE:
            return
        cfg = self.cfg
        if ev.tick1280k:
            if ev.tick64k:
                # combs sample the last integrator before this edge updates it
                self.cic.comb()
                _shift_tags(self.comb_tags, self.integ_tags[-1])
                out, sat = requantize(self.cic.output, cfg.cic_shift, DATA_WIDTH, cfg.rounding)
                self._sat("cic_output", sat)
                self._mark(5, self.comb_tags[-1], c, out)
                if self.comb_tags[-1] >= 0:
                    self.outputs.append(out)
            self.cic.integrate(self.comp.y)
            _accumulate_tags(self.integ_tags, self.comp.y_tag)
            self._mark(4, self.integ_tags[-1], c, self.cic.integ[-1])
            self.comp.load(self.bs.y, self.bs.y_tag)
            self._mark(3, self.bs.y_tag, c, self.bs.y)
            self.bs.load(self.mix, self.mix_tag)
            self._mark(2, self.mix_tag, c, self.mix)
            self.mix, sat = requantize(self.in_val * self.nco_out, cfg.mixer_shift,
                                       DATA_WIDTH, cfg.rounding)
            self._sat("mixer", sat)
            self.mix_tag = self.in_tag
            self._mark(1, self.mix_tag, c, self.mix)
            self.nco_out = self.nco.step()
            self.in_val, self.in_tag = self.input.take()
            self._mark(0, self.in_tag, c, self.in_val)
        if self.bs.busy or ev.ctrl:
            if self.bs.step(ev.ctrl, ev.fd) is not None:
                self._check_sequence("band_select", self.bs, self._last_tags)
            if self.comp.step(ev.ctrl, ev.fd) is not None:
                self._check_sequence("compensation", self.comp, self._last_tags)


def duc_run(samples, cfg: DucConfig | None = None, n_master_cycles: int | None = None,
            record: bool = False, reset_at: int | None = None) -> tuple[np.ndarray, PipelineTrace]:
    """Up-convert a 14-bit 64 kHz stream to 1280 kHz around the carrier."""
    return DucPipeline(cfg or DucConfig(), record).run(samples, n_master_cycles, reset_at)


def ddc_run(samples, cfg: DdcConfig | None = None, n_master_cycles: int | None = None,
            record: bool = False, reset_at: int | None = None) -> tuple[np.ndarray, PipelineTrace]:
    """Down-convert a 14-bit 1280 kHz stream to 64 kHz baseband."""
    return DdcPipeline(cfg or DdcConfig(), record).run(samples, n_master_cycles, reset_at)
