"""Command-line front end: ``ducddc gen|run|spectrum|design|latency-check``."""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .analysis import magnitude_spectrum, spectrum_db
from .cic import CicSpec, cic_magnitude
from .clocking import FAST_HZ, SLOW_HZ
from .dds import nco_samples
from .fileformats import FormatError, RunConfig, StreamFile, read_coefficients, write_coefficients
from .filters import (DATA_WIDTH, FilterDesignError, design_cic_compensator, design_highpass,
                      design_lowpass, stopband_attenuation_db)
from .fixedpoint import max_value
from .pipeline import (ConfigError, DdcConfig, DucConfig, LatencyViolation, assert_latency,
                       ddc_run, duc_run)

DDS_WIDTH = 8


class CliError(Exception):
    pass


# gen


def generate(shape: str, count: int, rate: float = SLOW_HZ, freqs=(4000.0,),
             amplitude: int = 4000, width: int = DATA_WIDTH) -> np.ndarray:
    if amplitude > max_value(width) or amplitude < 0:
        raise CliError(f"amplitude must lie in 0..{max_value(width)} for {width}-bit samples")
    if count <= 0:
        raise CliError("count must be positive")
    if shape == "sine":
        for f in freqs:
            if not 0 < f < rate / 2:
                raise CliError(f"sine frequency must satisfy 0 < freq < rate/2 "
                               f"({rate / 2:g} Hz); got {f:g}")
        t = np.arange(count) / rate
        tone = sum(np.sin(2 * np.pi * f * t) for f in freqs) / len(freqs)
        return np.round(amplitude * tone).astype(np.int64)
    x = np.zeros(count, dtype=np.int64)
    if shape == "impulse":
        x[0] = amplitude
    elif shape in ("step", "dc"):
        x[:] = amplitude
    else:
        raise CliError(f"unknown shape {shape!r}")
    return x


def cmd_gen(args) -> int:
    rate = args.rate
    if args.shape == "dds":
        if args.ftw is None:
            raise CliError("dds output needs --ftw")
        x = nco_samples(args.ftw, args.count)
        StreamFile(x, rate, DDS_WIDTH).write(args.out)
        print(f"wrote {len(x)} DDS samples (ftw {args.ftw}) at {rate:g} Hz to {args.out}")
        return 0
    x = generate(args.shape, args.count, rate, args.freq or [4000.0], args.amplitude, args.width)
    StreamFile(x, rate, args.width).write(args.out)
    print(f"wrote {len(x)} samples at {rate:g} Hz to {args.out}")
    return 0


# run


def build_chain_config(cfg: RunConfig):
    hp = read_coefficients(cfg.coeff_hp, "highpass") if cfg.coeff_hp else None
    comp = read_coefficients(cfg.coeff_comp, "compensation") if cfg.coeff_comp else None
    if cfg.chain == "duc":
        kw = {"cic_shift": cfg.cic_shift} if cfg.cic_shift is not None else {}
        return DucConfig(carrier_ftw=cfg.ftw, if_highpass=hp, compensation=comp,
                         mixer_shift=cfg.mixer_shift, **kw)
    kw = {"cic_shift": cfg.cic_shift} if cfg.cic_shift is not None else {}
    return DdcConfig(carrier_ftw=cfg.ftw, band_select_kind=cfg.band_select,
                     band_select_cutoff=cfg.band_select_cutoff, band_select=hp,
                     compensation=comp, mixer_shift=cfg.mixer_shift, **kw)


def run_stream(cfg: RunConfig, stream: StreamFile):
    """Run one chain over a stream; returns (output stream, trace)."""
    cfg.validate()
    expected = SLOW_HZ if cfg.chain == "duc" else FAST_HZ
    if stream.is_float:
        raise CliError("run needs an integer (fixed-point) stream")
    if stream.rate != expected:
        raise CliError(f"{cfg.chain} input must be sampled at {expected} Hz, got {stream.rate:g}")
    chain = build_chain_config(cfg)
    runner = duc_run if cfg.chain == "duc" else ddc_run
    y, trace = runner(stream.samples, chain, cfg.master_cycles)
    out_rate = FAST_HZ if cfg.chain == "duc" else SLOW_HZ
    return StreamFile(y, out_rate, DATA_WIDTH), trace


def _run_job(job):
    cfg, in_path, out_path, trace_path = job
    out, trace = run_stream(cfg, StreamFile.read(in_path))
    out.write(out_path)
    summary = {
        "input": str(in_path), "output": str(out_path), "chain": cfg.chain,
        "consumed": trace.consumed, "produced": trace.produced,
        "carrier_ftw": trace.carrier_ftw, "realized_carrier_hz": trace.carrier_hz,
        "first_valid_cycle": trace.first_valid_cycle,
        "saturations": sum(trace.saturations.values()),
    }
    if trace_path:
        Path(trace_path).write_text(json.dumps(trace.to_dict(), indent=2) + "\n")
    return summary


def _suffixed(path: str | None, tag: str) -> str | None:
    if path is None:
        return None
    p = Path(path)
    return str(p.with_name(f"{p.stem}_{tag}{p.suffix}"))


def cmd_run(args) -> int:
    base = RunConfig.read(args.config) if args.config else RunConfig()
    if args.chain:
        base.chain = args.chain
    if args.master_cycles is not None:
        base.master_cycles = args.master_cycles
    if args.coeff_hp:
        base.coeff_hp = args.coeff_hp
    if args.coeff_comp:
        base.coeff_comp = args.coeff_comp
    if args.allow_offgrid:
        base.allow_offgrid = True
    carriers = args.carrier_khz or [base.carrier_khz]
    jobs = []
    for khz in carriers:
        for inp in args.input:
            cfg = RunConfig(**{**base.__dict__, "carrier_khz": khz, "extra": dict(base.extra)})
            cfg.validate()
            tag = f"{Path(inp).stem}_{khz:g}k"
            many = len(carriers) * len(args.input) > 1
            jobs.append((cfg, inp, _suffixed(args.out, tag) if many else args.out,
                         _suffixed(args.trace, tag) if many else args.trace))
    for cfg, *_ in jobs:
        if cfg.allow_offgrid:
            print(f"realized carrier {cfg.ftw * FAST_HZ / 256:g} Hz (ftw {cfg.ftw})", file=sys.stderr)
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            summaries = list(pool.map(_run_job, jobs))
    else:
        summaries = [_run_job(j) for j in jobs]
    for s in summaries:
        print(json.dumps(s))
    return 0


# spectrum


def cmd_spectrum(args) -> int:
    stream = StreamFile.read(args.input)
    if stream.count == 0:
        raise CliError("empty stream")
    n = args.n or stream.count
    if n > stream.count:
        raise CliError(f"n={n} exceeds the stream length {stream.count}")
    freqs, db = spectrum_db(stream.samples, stream.rate, n, args.window)
    lines = ["frequency_hz,magnitude_db"] + [f"{f:.6f},{d:.4f}" for f, d in zip(freqs, db)]
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
        _, mag = magnitude_spectrum(stream.samples, stream.rate, n, args.window)
        print(f"peak at {freqs[int(np.argmax(mag))]:g} Hz; wrote {len(freqs)} bins to {args.out}")
    else:
        sys.stdout.write(text)
    return 0


# design


def composite_flatness_db(spec, cic: CicSpec, sample_rate: float, f_high: float,
                          band=(300.0, 4000.0)) -> float:
    """Peak-to-peak ripple (dB) of compensator x normalised CIC over ``band``."""
    f = np.linspace(band[0], band[1], 512)
    h = spec.response(f, sample_rate) * cic_magnitude(cic, f, f_high) / cic_magnitude(cic, 0.0, f_high)
    db = 20 * np.log10(h)
    return float(db.max() - db.min())


def cmd_design(args) -> int:
    if args.kind in ("highpass", "lowpass"):
        if args.cutoff is None:
            raise CliError(f"{args.kind} design needs --cutoff")
        make = design_highpass if args.kind == "highpass" else design_lowpass
        spec = make(args.cutoff, args.rate)
        write_coefficients(spec, args.out)
        att = stopband_attenuation_db(spec, args.cutoff, args.rate)
        print(f"wrote {args.kind} ({len(spec.taps)} taps, frac {spec.frac}) to {args.out}; "
              f"stopband attenuation {att:.1f} dB")
        return 0
    cic = CicSpec(stages=args.cic_stages, rate=args.cic_rate)
    band = tuple(args.band)
    spec = design_cic_compensator(cic, args.rate, band, f_high=args.f_high)
    write_coefficients(spec, args.out)
    ripple = composite_flatness_db(spec, cic, args.rate, args.f_high, band)
    print(f"wrote compensator ({len(spec.taps)} taps, frac {spec.frac}) to {args.out}; "
          f"composite ripple {ripple:.3f} dB over {band[0]:g}-{band[1]:g} Hz")
    return 0


# latency-check


def impulse_run(chain: str, amplitude: int = 4000):
    if chain == "duc":
        return duc_run([amplitude] + [0] * 15)
    return ddc_run([amplitude] + [0] * 319)


def cmd_latency(args) -> int:
    chains = ["duc", "ddc"] if args.chain == "both" else [args.chain]
    failed = False
    traces = {}
    for chain in chains:
        _, trace = impulse_run(chain)
        traces[chain] = trace.to_dict()
        try:
            print(assert_latency(trace).format())
        except LatencyViolation as e:
            print(e.report.format())
            failed = True
    if args.trace:
        Path(args.trace).write_text(json.dumps(traces, indent=2) + "\n")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ducddc", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a 14-bit test stream")
    g.add_argument("shape", choices=["sine", "impulse", "step", "dc", "dds"])
    g.add_argument("--ftw", type=int, help="tuning word for the dds shape")
    g.add_argument("--freq", type=float, action="append",
                   help="tone frequency in Hz (repeat for a multi-tone sum)")
    g.add_argument("--rate", type=float, default=float(SLOW_HZ))
    g.add_argument("--amplitude", type=int, default=4000)
    g.add_argument("--count", type=int, default=1600)
    g.add_argument("--width", type=int, default=DATA_WIDTH)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("run", help="run the DUC or DDC over stream files")
    r.add_argument("input", nargs="+")
    r.add_argument("--config")
    r.add_argument("--chain", choices=["duc", "ddc"])
    r.add_argument("--carrier-khz", type=float, action="append",
                   help="carrier in kHz; repeat to sweep")
    r.add_argument("--allow-offgrid", action="store_true")
    r.add_argument("--master-cycles", type=int)
    r.add_argument("--coeff-hp")
    r.add_argument("--coeff-comp")
    r.add_argument("--out", required=True)
    r.add_argument("--trace")
    r.add_argument("--jobs", type=int, default=1)
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("spectrum", help="DFT magnitude (dB re peak) as CSV")
    s.add_argument("input")
    s.add_argument("--window", choices=["rectangular", "hann"], default="rectangular")
    s.add_argument("-n", "--points", dest="n", type=int)
    s.add_argument("--out")
    s.set_defaults(func=cmd_spectrum)

    d = sub.add_parser("design", help="design a 24-tap filter and write its coefficients")
    d.add_argument("kind", choices=["highpass", "lowpass", "compensator"])
    d.add_argument("--cutoff", type=float)
    d.add_argument("--rate", type=float, default=float(SLOW_HZ))
    d.add_argument("--band", type=float, nargs=2, default=[300.0, 4000.0])
    d.add_argument("--cic-stages", type=int, default=5)
    d.add_argument("--cic-rate", type=int, default=20)
    d.add_argument("--f-high", type=float, default=float(FAST_HZ))
    d.add_argument("--out", required=True)
    d.set_defaults(func=cmd_design)

    lc = sub.add_parser("latency-check", help="check the itemised latency budgets")
    lc.add_argument("--chain", choices=["duc", "ddc", "both"], default="both")
    lc.add_argument("--trace")
    lc.set_defaults(func=cmd_latency)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CliError, ConfigError, FormatError, FilterDesignError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
