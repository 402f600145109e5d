"""Plain-text stream, coefficient and run-config files.

Stream file::

    # rate=64000 width=14 count=3
    12
    -7
    0

Float streams omit ``width`` and hold one decimal real per line. Coefficient
files carry ``# width=<w> frac=<f>`` and 24 integers. Run configs are
``key=value`` lines; ``#`` starts a comment.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dds import TABLE_SIZE
from .clocking import FAST_HZ
from .filters import NUM_TAPS, FirSpec
from .fixedpoint import max_value, min_value
from .pipeline import CARRIER_FTW_RANGE, ConfigError

PathLike = str | os.PathLike


class FormatError(ValueError):
    pass


def _parse_header(line: str, path) -> dict[str, str]:
    if not line.startswith("#"):
        raise FormatError(f"{path}: missing '# key=value' header line")
    fields = {}
    for item in line[1:].split():
        key, sep, value = item.partition("=")
        if not sep:
            raise FormatError(f"{path}: malformed header item {item!r}")
        fields[key] = value
    return fields


@dataclass
class StreamFile:
    samples: np.ndarray
    rate: float
    width: int | None = None  # None marks a float stream

    def __post_init__(self):
        if self.width is None:
            self.samples = np.asarray(self.samples, dtype=float)
            return
        self.samples = np.asarray(self.samples, dtype=np.int64)
        if len(self.samples) and (self.samples.min() < min_value(self.width)
                                  or self.samples.max() > max_value(self.width)):
            raise FormatError(f"samples do not fit {self.width} bits")

    @property
    def count(self) -> int:
        return len(self.samples)

    @property
    def is_float(self) -> bool:
        return self.width is None

    def write(self, path: PathLike) -> None:
        head = f"# rate={self.rate:g}"
        if self.width is not None:
            head += f" width={self.width}"
        head += f" count={self.count}"
        if self.is_float:
            body = [repr(float(v)) for v in self.samples]
        else:
            body = [str(int(v)) for v in self.samples]
        Path(path).write_text("\n".join([head, *body]) + "\n")

    @classmethod
    def read(cls, path: PathLike) -> StreamFile:
        lines = Path(path).read_text().splitlines()
        if not lines:
            raise FormatError(f"{path}: empty file")
        head = _parse_header(lines[0], path)
        try:
            rate = float(head["rate"])
            count = int(head["count"])
        except KeyError as e:
            raise FormatError(f"{path}: header lacks {e.args[0]}") from None
        body = [s for s in (ln.strip() for ln in lines[1:]) if s]
        if len(body) != count:
            raise FormatError(f"{path}: header says count={count}, body has {len(body)}")
        if "width" in head:
            try:
                values = [int(s) for s in body]
            except ValueError as e:
                raise FormatError(f"{path}: {e}") from None
            return cls(np.array(values, dtype=np.int64), rate, int(head["width"]))
        return cls(np.array([float(s) for s in body]), rate)


def write_coefficients(spec: FirSpec, path: PathLike) -> None:
    lines = [f"# width={spec.width} frac={spec.frac} kind={spec.kind}"]
    lines += [str(c) for c in spec.taps]
    Path(path).write_text("\n".join(lines) + "\n")


def read_coefficients(path: PathLike, kind: str | None = None) -> FirSpec:
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise FormatError(f"{path}: empty file")
    head = _parse_header(lines[0], path)
    taps = [int(s) for s in (ln.strip() for ln in lines[1:]) if s]
    if len(taps) != NUM_TAPS:
        raise FormatError(f"{path}: expected {NUM_TAPS} coefficients, found {len(taps)}")
    try:
        return FirSpec(tuple(taps), kind or head.get("kind", "highpass"),
                       int(head.get("width", 16)), int(head.get("frac", 15)))
    except ValueError as e:
        raise FormatError(f"{path}: {e}") from None


CARRIER_STEP_KHZ = FAST_HZ / TABLE_SIZE / 1000  # 5 kHz


def carrier_ftw(carrier_khz: float, allow_offgrid: bool = False) -> int:
    """Tuning word for a carrier in kHz; off-grid values need ``allow_offgrid``."""
    lo, hi = (f * CARRIER_STEP_KHZ for f in CARRIER_FTW_RANGE)
    if not lo <= carrier_khz <= hi:
        raise ConfigError(f"carrier_khz must lie in {lo:g}..{hi:g}, got {carrier_khz:g}")
    ftw = round(carrier_khz / CARRIER_STEP_KHZ)
    if not allow_offgrid and ftw * CARRIER_STEP_KHZ != carrier_khz:
        raise ConfigError(
            f"carrier_khz must be a multiple of {CARRIER_STEP_KHZ:g} kHz "
            f"(got {carrier_khz:g}); pass --allow-offgrid to use "
            f"{ftw * CARRIER_STEP_KHZ:g} kHz instead")
    return ftw


@dataclass
class RunConfig:
    chain: str = "duc"
    carrier_khz: float = 200.0
    master_cycles: int | None = None
    coeff_hp: str | None = None
    coeff_comp: str | None = None
    mixer_shift: int = 7
    cic_shift: int | None = None
    band_select: str = "highpass"
    band_select_cutoff: float = 100_000.0
    allow_offgrid: bool = False
    extra: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.chain not in ("duc", "ddc"):
            raise ConfigError(f"chain must be 'duc' or 'ddc', got {self.chain!r}")
        if self.band_select not in ("highpass", "lowpass"):
            raise ConfigError(f"band_select must be 'highpass' or 'lowpass', got {self.band_select!r}")
        if self.master_cycles is not None and self.master_cycles <= 0:
            raise ConfigError("master_cycles must be positive")
        if self.extra:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(self.extra))}")
        carrier_ftw(self.carrier_khz, self.allow_offgrid)

    @property
    def ftw(self) -> int:
        return carrier_ftw(self.carrier_khz, self.allow_offgrid)

    @classmethod
    def parse(cls, text: str) -> RunConfig:
        cfg = cls()
        for n, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = (s.strip() for s in line.partition("="))
            if not sep:
                raise ConfigError(f"line {n}: expected key=value, got {raw!r}")
            cfg.set(key, value)
        return cfg

    @classmethod
    def read(cls, path: PathLike) -> RunConfig:
        return cls.parse(Path(path).read_text())

    def set(self, key: str, value: str) -> None:
        conv = {"carrier_khz": float, "master_cycles": int, "mixer_shift": int,
                "cic_shift": int, "band_select_cutoff": float,
                "allow_offgrid": lambda s: s.lower() in ("1", "true", "yes")}
        if key not in self.__dataclass_fields__ or key == "extra":
            self.extra[key] = value
            return
        try:
            setattr(self, key, conv.get(key, str)(value))
        except ValueError:
            raise ConfigError(f"bad value for {key}: {value!r}") from None
